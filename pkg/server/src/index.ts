import { buildApp } from "./app.js";
import { parseConfig } from "./config.js";
import { makeBackend } from "./scoring.js";

const config = parseConfig(process.argv.slice(2));
const backend = makeBackend(config.backend, config.loadDelayMs);
const app = buildApp(config, backend);

const server = app.listen(config.port, () => {
  console.log(
    `score server on :${config.port} (model ${config.modelId}, mode ${config.mode}, ` +
      `backend ${backend.id}, max_batch ${config.maxBatch})`,
  );
});

void backend.load().then(() => console.log("backend ready"));

for (const signal of ["SIGINT", "SIGTERM"] as const) {
  process.on(signal, () => server.close(() => process.exit(0)));
}
