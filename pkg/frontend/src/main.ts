/**
 * Sidecar entry point.
 *
 *   node dist/main.js [--port 8763] [--models path/to/relations.json]
 *
 * --models points at a JSON relation-name -> statement mapping, shipped as
 * data so backend swaps need no code change.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { type RelationTable } from "./models.js";
import { createApp } from "./server.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const DEFAULT_RELATIONS = join(HERE, "..", "data", "relations.json");

function loadRelations(path: string): RelationTable {
  const parsed: unknown = JSON.parse(readFileSync(path, "utf-8"));
  if (parsed === null || typeof parsed !== "object" || Array.isArray(parsed)) {
    throw new Error(`relation table in ${path} must be a JSON object`);
  }
  const table: RelationTable = {};
  for (const [name, statement] of Object.entries(parsed)) {
    if (typeof statement !== "string") {
      throw new Error(`relation ${name} must map to a string statement`);
    }
    table[name] = statement;
  }
  if (Object.keys(table).length === 0) {
    throw new Error(`relation table in ${path} is empty`);
  }
  return table;
}

async function main(): Promise<void> {
  const argv = await yargs(hideBin(process.argv))
    .option("port", { type: "number", default: 8763 })
    .option("models", {
      type: "string",
      default: DEFAULT_RELATIONS,
      describe: "path to the relation-name mapping JSON",
    })
    .option("dim", { type: "number", default: 256 })
    .option("seed", { type: "number", default: 0 })
    .strict()
    .parse();

  let relations: RelationTable;
  try {
    relations = loadRelations(argv.models);
  } catch (err) {
    console.error(`failed to load models: ${(err as Error).message}`);
    process.exit(1);
  }

  const app = createApp({ relations, dim: argv.dim, seed: argv.seed });
  app.listen(argv.port, () => {
    console.log(
      `sidecar listening on :${argv.port} ` +
        `(dim=${argv.dim}, relations=${Object.keys(relations).length})`,
    );
  });
}

void main();
