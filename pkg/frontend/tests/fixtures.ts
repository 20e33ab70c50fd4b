import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const here = dirname(fileURLToPath(import.meta.url));
const dataDir = join(here, "..", "..", "tests", "data");

export const SAMPLE_CONLL = readFileSync(join(dataDir, "sample.conll"), "utf-8");
export const SAMPLE_TASKS = readFileSync(join(dataDir, "sample_tasks.json"), "utf-8");
