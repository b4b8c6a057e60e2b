"""Domain inventories: label sets, synset assignments, hierarchies.

File formats:
  assignment TSV  ``<synset_id>\\t<label1>[;<label2>...]`` — tab-separated so
                  labels may contain commas ("Business, economics and finance");
                  multiple labels for one synset are ``;``-joined
  hierarchy TSV   ``<child_label>\\t<parent_label>``; roots as ``<label>\\t-``
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InventoryError, NoCandidateDomainsError
from .lexicon import SynsetId, normalize_label


@dataclass(frozen=True)
class DomainInventory:
    """A named label set with synset assignments and an optional hierarchy.

    Immutable after load; truncation returns a new inventory. ``hierarchy``
    maps each label to its parent (None for roots) and is always a forest.
    """

    name: str
    labels: frozenset[str]
    assignments: dict[SynsetId, tuple[str, ...]]
    hierarchy: dict[str, str | None] | None = None
    fallback_label: str | None = None

    def __post_init__(self):
        for sid, labels in self.assignments.items():
            stray = [l for l in labels if l not in self.labels]
            if stray:
                raise InventoryError(f"{self.name}: synset {sid} assigned unknown labels {stray}")
        if self.fallback_label is not None and self.fallback_label not in self.labels:
            raise InventoryError(f"{self.name}: fallback label {self.fallback_label!r} not in label set")
        if self.hierarchy is not None:
            _check_forest(self.hierarchy, self.name)

    def depth(self, label: str) -> int:
        """Depth of a label in the hierarchy; roots have depth 1."""
        if self.hierarchy is None:
            raise InventoryError(f"{self.name} has no hierarchy")
        depth = 1
        node = self.hierarchy[label]
        while node is not None:
            depth += 1
            node = self.hierarchy[node]
        return depth

    def depth_histogram(self) -> dict[int, int]:
        if self.hierarchy is None:
            return {}
        hist: dict[int, int] = {}
        for label in self.hierarchy:
            d = self.depth(label)
            hist[d] = hist.get(d, 0) + 1
        return dict(sorted(hist.items()))

    def multi_label_synsets(self) -> int:
        return sum(1 for labels in self.assignments.values() if len(labels) > 1)

    def content_hash(self) -> str:
        """Deterministic sha256 over the inventory's full content."""
        payload = {
            "name": self.name,
            "labels": sorted(self.labels),
            "assignments": {str(k): list(v) for k, v in sorted(self.assignments.items())},
            "hierarchy": self.hierarchy and dict(sorted(self.hierarchy.items())),
            "fallback": self.fallback_label,
        }
        blob = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class CandidateDomains:
    """The deduplicated domain set of a word's senses, in first-appearance order.

    ``provenance`` maps each domain back to the senses that contributed it.
    With single-label inventories ``len(domains) <= number of senses``; a
    multi-label inventory (several labels on one sense) may exceed that bound.
    """

    word: str
    domains: tuple[str, ...]
    provenance: dict[str, tuple[SynsetId, ...]] = field(default_factory=dict)


def _check_forest(hierarchy: dict[str, str | None], name: str) -> None:
    for label, parent in hierarchy.items():
        if parent is not None and parent not in hierarchy:
            raise InventoryError(f"{name}: parent label {parent!r} of {label!r} undeclared")
    for start in hierarchy:
        seen = {start}
        node = hierarchy[start]
        while node is not None:
            if node in seen:
                raise InventoryError(f"{name}: cycle in hierarchy involving {node!r}")
            seen.add(node)
            node = hierarchy[node]


def load_hierarchy(path: str | Path) -> dict[str, str | None]:
    """Load a ``child\\tparent`` hierarchy file into a parent map."""
    path = Path(path)
    hierarchy: dict[str, str | None] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise InventoryError(f"{path.name}:{lineno}: expected 2 fields, got {len(fields)}")
            child = normalize_label(fields[0])
            parent = normalize_label(fields[1])
            if not child:
                raise InventoryError(f"{path.name}:{lineno}: empty label")
            parent_value = None if parent == "-" else parent
            if child in hierarchy and hierarchy[child] != parent_value:
                raise InventoryError(
                    f"{path.name}:{lineno}: conflicting parent for {child!r} "
                    f"({hierarchy[child]!r} vs {parent_value!r})"
                )
            hierarchy[child] = parent_value
    return hierarchy


def load_inventory(
    path: str | Path,
    name: str,
    hierarchy_path: str | Path | None = None,
    fallback_label: str | None = None,
) -> DomainInventory:
    """Load an assignment TSV, plus an optional hierarchy file.

    The label set is the union of assigned labels and hierarchy-declared
    labels. When a hierarchy is given, every assigned label (and the
    fallback, if any) must be declared in it.
    """
    path = Path(path)
    hierarchy = load_hierarchy(hierarchy_path) if hierarchy_path is not None else None
    assignments: dict[SynsetId, list[str]] = {}
    labels: set[str] = set(hierarchy or ())
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise InventoryError(f"{path.name}:{lineno}: expected 2 fields, got {len(fields)}")
            sid = SynsetId.parse(fields[0])
            row_labels = [normalize_label(l) for l in fields[1].split(";")]
            if not all(row_labels):
                raise InventoryError(f"{path.name}:{lineno}: empty label for {sid}")
            if hierarchy is not None:
                stray = [l for l in row_labels if l not in hierarchy]
                if stray:
                    raise InventoryError(
                        f"{path.name}:{lineno}: label(s) {stray} absent from declared hierarchy"
                    )
            merged = assignments.setdefault(sid, [])
            for label in row_labels:
                if label not in merged:
                    merged.append(label)
                labels.add(label)
    if fallback_label is not None:
        fallback_label = normalize_label(fallback_label)
        if hierarchy is not None and fallback_label not in hierarchy:
            raise InventoryError(f"fallback label {fallback_label!r} absent from declared hierarchy")
        labels.add(fallback_label)
    return DomainInventory(
        name=name,
        labels=frozenset(labels),
        assignments={sid: tuple(lbls) for sid, lbls in assignments.items()},
        hierarchy=hierarchy,
        fallback_label=fallback_label,
    )


def _ancestor_at_depth(inv: DomainInventory, label: str, max_depth: int) -> str:
    node = label
    while inv.depth(node) > max_depth:
        parent = inv.hierarchy[node]  # type: ignore[index]
        assert parent is not None, "rooted forest guarantees an ancestor at every depth"
        node = parent
    return node


def truncate_hierarchy(inv: DomainInventory, max_depth: int) -> DomainInventory:
    """Drop labels deeper than ``max_depth``, remapping assignments upward.

    Every assignment to a removed label moves to its nearest ancestor at
    depth <= max_depth. Idempotent; never increases the label count; the
    input inventory is left untouched.
    """
    if inv.hierarchy is None:
        raise InventoryError(f"{inv.name} has no hierarchy to truncate")
    if max_depth < 1:
        raise InventoryError(f"max_depth must be >= 1, got {max_depth}")
    kept = {label for label in inv.hierarchy if inv.depth(label) <= max_depth}
    new_hierarchy = {label: inv.hierarchy[label] for label in inv.hierarchy if label in kept}
    new_assignments: dict[SynsetId, tuple[str, ...]] = {}
    for sid, labels in inv.assignments.items():
        remapped: list[str] = []
        for label in labels:
            target = _ancestor_at_depth(inv, label, max_depth)
            if target not in remapped:
                remapped.append(target)
        new_assignments[sid] = tuple(remapped)
    fallback = inv.fallback_label
    if fallback is not None:
        fallback = _ancestor_at_depth(inv, fallback, max_depth)
    return DomainInventory(
        name=inv.name,
        labels=frozenset(kept),
        assignments=new_assignments,
        hierarchy=new_hierarchy,
        fallback_label=fallback,
    )


def domains_of_sense(inv: DomainInventory, synset: SynsetId) -> tuple[str, ...]:
    """Labels assigned to a synset; unassigned synsets get the fallback, if any."""
    assigned = inv.assignments.get(synset)
    if assigned:
        return assigned
    if inv.fallback_label is not None:
        return (inv.fallback_label,)
    return ()


def candidate_domains(
    inv: DomainInventory,
    senses: list[SynsetId] | tuple[SynsetId, ...],
    word: str = "",
) -> CandidateDomains:
    """Union of the senses' domains in first-appearance order over sense rank.

    Raises NoCandidateDomainsError when every sense is unassigned and the
    inventory has no fallback label.
    """
    if not senses:
        raise ValueError("candidate_domains requires at least one sense")
    domains: list[str] = []
    provenance: dict[str, list[SynsetId]] = {}
    for sid in senses:
        for label in domains_of_sense(inv, sid):
            if label not in provenance:
                domains.append(label)
                provenance[label] = []
            provenance[label].append(sid)
    if not domains:
        raise NoCandidateDomainsError(word or str(senses[0]))
    return CandidateDomains(
        word=word,
        domains=tuple(domains),
        provenance={label: tuple(sids) for label, sids in provenance.items()},
    )
