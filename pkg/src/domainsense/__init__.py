"""domainsense: zero-shot WSD and gloss domain labelling via sentence-pair scoring.

Senses map to coarse domains through pluggable inventories; label selection
is cast as scoring premise/hypothesis pairs with an entailment or
next-sentence model behind a uniform scorer interface.
"""

from .domain_labelling import (
    DlPrediction,
    ZeroShotGlossLabeler,
    label_gloss,
    read_dl_predictions,
    run_domain_labelling,
    write_dl_predictions,
)
from .errors import (
    DatasetError,
    DegenerateInputError,
    DomainSenseError,
    EvalError,
    InventoryError,
    LexiconError,
    ManifestError,
    NoCandidateDomainsError,
    PromptError,
    ScorerError,
)
from .evaluation import (
    CorrelationReport,
    EvalReport,
    LabelScore,
    correlate_tasks,
    score_domain_labelling,
    score_wsd,
    spearman_rho,
    write_correlation_csv,
)
from .inventory import (
    CandidateDomains,
    DomainInventory,
    candidate_domains,
    domains_of_sense,
    load_hierarchy,
    load_inventory,
    truncate_hierarchy,
)
from .lexicon import (
    GlossLabelInstance,
    Lexicon,
    Synset,
    SynsetId,
    WsdInstance,
    dump_lexicon,
    load_gloss_dataset,
    load_lexicon,
    load_wsd_dataset,
    strip_hints,
)
from .metadata import RunMetadata
from .prompts import (
    Hypothesis,
    PromptTemplate,
    builtin_templates,
    generate_hypotheses,
    get_template,
    load_templates,
    render_pair,
)
from .scoring import (
    Scorer,
    ScorerConfig,
    ScoreRecord,
    ScoreRequest,
    cache_key,
    score_batch,
)
from .wsd import (
    WsdPrediction,
    ZeroShotWsd,
    argmax_label,
    disambiguate,
    gold_domains,
    random_baseline_analytic,
    random_baseline_mc,
    read_predictions,
    run_wsd,
    write_predictions,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateDomains",
    "CorrelationReport",
    "DatasetError",
    "DegenerateInputError",
    "DlPrediction",
    "DomainInventory",
    "DomainSenseError",
    "EvalError",
    "EvalReport",
    "GlossLabelInstance",
    "Hypothesis",
    "InventoryError",
    "LabelScore",
    "Lexicon",
    "LexiconError",
    "ManifestError",
    "NoCandidateDomainsError",
    "PromptError",
    "PromptTemplate",
    "RunMetadata",
    "ScoreRecord",
    "ScoreRequest",
    "Scorer",
    "ScorerConfig",
    "ScorerError",
    "Synset",
    "SynsetId",
    "WsdInstance",
    "WsdPrediction",
    "ZeroShotGlossLabeler",
    "ZeroShotWsd",
    "argmax_label",
    "builtin_templates",
    "cache_key",
    "candidate_domains",
    "correlate_tasks",
    "disambiguate",
    "domains_of_sense",
    "dump_lexicon",
    "generate_hypotheses",
    "get_template",
    "gold_domains",
    "label_gloss",
    "load_gloss_dataset",
    "load_hierarchy",
    "load_inventory",
    "load_lexicon",
    "load_templates",
    "load_wsd_dataset",
    "random_baseline_analytic",
    "random_baseline_mc",
    "read_dl_predictions",
    "read_predictions",
    "render_pair",
    "run_domain_labelling",
    "run_wsd",
    "score_batch",
    "score_domain_labelling",
    "score_wsd",
    "spearman_rho",
    "strip_hints",
    "truncate_hierarchy",
    "write_correlation_csv",
    "write_dl_predictions",
    "write_predictions",
]
