// Shared contracts: series manifests produced by the toolkit's `walks`
// command, and the ratings document consumed by its `analyze` command.

export const CONDITIONS = [
  "REAL", "PM1", "PM2", "PM3", "SPS", "STAT", "ADD", "WAVE", "HIFI",
] as const;
export type Condition = (typeof CONDITIONS)[number];

export interface SeriesManifest {
  series_id: string;
  interval_s: number;
  conditions: Record<Condition, string>; // condition -> wav path
}

// Pre-blinded index entry: the page never learns condition names; the
// id -> condition key lives in a separate file consulted only at export.
export interface BlindSeries {
  series_id: string;
  interval_s: number;
  stimuli: string[]; // opaque wav filenames
}

export type StimulusKey = Record<string, { series_id: string; condition: Condition }>;

// Scale anchor labels sit at fixed positions on the unit axis.
export const SCALE_ANCHORS: ReadonlyArray<{ position: number; label: string }> = [
  { position: 0, label: "very unrealistic" },
  { position: 0.33, label: "somewhat unrealistic" },
  { position: 0.66, label: "somewhat realistic" },
  { position: 1, label: "very realistic" },
];

export interface Experience {
  critical_listening: boolean;
  years_music: number;
  years_engineering: number;
  years_sound_design: number;
}

export interface Participant {
  id: string;
  experience: Experience;
  headphones: string;
}

export interface RatingsPage {
  series_id: string;
  marks: Record<string, number>; // condition -> value in [0, 1]
}

export interface RatingsDocument {
  participant: Participant;
  pages: RatingsPage[];
  presentation?: {
    seed: number;
    series_order: string[];
    stimulus_order: Record<string, string[]>; // series_id -> opaque ids shown
  };
}

export function validateRatingsDocument(doc: RatingsDocument): string[] {
  const problems: string[] = [];
  if (!doc.participant?.id) problems.push("participant.id missing");
  if (typeof doc.participant?.experience?.critical_listening !== "boolean")
    problems.push("participant.experience.critical_listening missing");
  if (!Array.isArray(doc.pages) || doc.pages.length === 0)
    problems.push("pages must be a non-empty list");
  for (const [i, pg] of (doc.pages ?? []).entries()) {
    if (!pg.series_id) problems.push(`pages[${i}].series_id missing`);
    const names = Object.keys(pg.marks ?? {});
    for (const c of CONDITIONS)
      if (!(c in (pg.marks ?? {}))) problems.push(`pages[${i}] missing ${c}`);
    for (const name of names) {
      if (!(CONDITIONS as readonly string[]).includes(name))
        problems.push(`pages[${i}] unknown condition ${name}`);
      const v = pg.marks[name];
      if (typeof v !== "number" || v < 0 || v > 1)
        problems.push(`pages[${i}].marks[${name}] out of [0, 1]`);
    }
  }
  return problems;
}
