// Session assembly: which series a participant hears, in what order, under
// which opaque stimulus ids. Condition names never reach the page markup;
// the id -> condition key is consulted only when the session is exported.
//
// Two index modes:
//   - named SeriesManifests (dev / trusted deployments): blinding happens
//     in memory here and the key rides along in the session;
//   - pre-blinded BlindSeries from the prepare-stimuli tool: stimuli arrive
//     already opaque and the key is supplied separately at export time.

import { mulberry32, pick, shuffled } from "./rng.js";
import {
  BlindSeries,
  CONDITIONS,
  Participant,
  SeriesManifest,
  StimulusKey,
} from "./types.js";

export const PAGES_PER_SESSION = 5;

export interface Stimulus {
  id: string; // opaque, shown to the participant
  url: string;
}

export interface SessionPage {
  seriesId: string;
  stimuli: Stimulus[]; // presentation order
}

export interface TestSession {
  participant: Participant;
  seed: number;
  pages: SessionPage[];
  key: StimulusKey | null; // null when the index was pre-blinded
}

function opaqueId(rng: () => number): string {
  const hex = () => Math.floor(rng() * 16).toString(16);
  return "s-" + Array.from({ length: 20 }, hex).join("");
}

function isNamed(series: SeriesManifest | BlindSeries): series is SeriesManifest {
  return "conditions" in series;
}

export function buildSession(
  participant: Participant,
  series: Array<SeriesManifest | BlindSeries>,
  seed: number,
  stimulusBase = "stimuli/",
): TestSession {
  if (series.length < PAGES_PER_SESSION) {
    throw new Error(`need at least ${PAGES_PER_SESSION} series, got ${series.length}`);
  }
  const rng = mulberry32(seed);
  const chosen = pick(series, PAGES_PER_SESSION, rng);
  const key: StimulusKey = {};
  let sawNamed = false;
  const pages: SessionPage[] = chosen.map((entry) => {
    let stimuli: Stimulus[];
    if (isNamed(entry)) {
      sawNamed = true;
      stimuli = shuffled(CONDITIONS, rng).map((condition) => {
        const id = opaqueId(rng);
        key[id] = { series_id: entry.series_id, condition };
        return { id, url: stimulusBase + entry.conditions[condition] };
      });
    } else {
      stimuli = shuffled(entry.stimuli, rng).map((file) => ({
        id: file.replace(/\.wav$/, ""),
        url: stimulusBase + file,
      }));
    }
    return { seriesId: entry.series_id, stimuli };
  });
  return { participant, seed, pages, key: sawNamed ? key : null };
}
