// Manifest-shuffling step: copy the walk WAVs of a series directory (output
// of the toolkit's `walks` command) into the static stimuli folder under
// opaque names, so neither filenames nor network requests reveal conditions.
//
// Usage: node dist/tools/prepare_stimuli.js <series_dir> <out_dir>

import { createHash } from "node:crypto";
import { copyFileSync, mkdirSync, readFileSync, readdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { BlindSeries, Condition, SeriesManifest, StimulusKey } from "../types.js";

function opaqueName(seriesId: string, condition: string, salt: string): string {
  const digest = createHash("sha256")
    .update(`${salt}:${seriesId}:${condition}`)
    .digest("hex");
  return `${digest.slice(0, 24)}.wav`;
}

export function prepareStimuli(seriesDir: string, outDir: string, salt?: string): string {
  const actualSalt = salt ?? Math.random().toString(36).slice(2);
  mkdirSync(outDir, { recursive: true });
  const index: BlindSeries[] = [];
  const key: StimulusKey = {};
  const files = readdirSync(seriesDir).filter((f) => f.endsWith(".json"));
  for (const file of files.sort()) {
    const manifest = JSON.parse(
      readFileSync(join(seriesDir, file), "utf-8"),
    ) as SeriesManifest;
    const stimuli: string[] = [];
    for (const [condition, wavName] of Object.entries(manifest.conditions)) {
      const opaque = opaqueName(manifest.series_id, condition, actualSalt);
      copyFileSync(join(seriesDir, wavName), join(outDir, opaque));
      stimuli.push(opaque);
      key[opaque] = { series_id: manifest.series_id, condition: condition as Condition };
    }
    index.push({
      series_id: manifest.series_id,
      interval_s: manifest.interval_s,
      stimuli: stimuli.sort(),
    });
  }
  writeFileSync(join(outDir, "series_index.json"), JSON.stringify(index, null, 2));
  const keyPath = join(outDir, "key.json");
  writeFileSync(keyPath, JSON.stringify(key, null, 2));
  return keyPath;
}

const isMain = process.argv[1]?.endsWith("prepare_stimuli.js");
if (isMain) {
  const [seriesDir, outDir] = process.argv.slice(2);
  if (!seriesDir || !outDir) {
    console.error("usage: prepare_stimuli <series_dir> <out_dir>");
    process.exit(2);
  }
  const keyPath = prepareStimuli(seriesDir, outDir);
  console.log(
    `stimuli prepared; ${keyPath} maps ids back to conditions and is ` +
      "fetched only after the last page is submitted",
  );
}
