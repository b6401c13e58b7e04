// Session export: translate opaque stimulus ids back to condition names,
// build the shared ratings document, POST it, and fall back to a download.

import { TestSession } from "./session.js";
import { RatingsDocument, StimulusKey, validateRatingsDocument } from "./types.js";

export interface PageResult {
  seriesId: string;
  marks: Record<string, number>; // opaque id -> value
}

export function buildRatingsDocument(
  session: TestSession,
  results: PageResult[],
  key?: StimulusKey,
): RatingsDocument {
  const lookup = session.key ?? key;
  if (!lookup) throw new Error("no stimulus key available to name the conditions");
  const pages = results.map((result) => {
    const marks: Record<string, number> = {};
    for (const [id, value] of Object.entries(result.marks)) {
      const entry = lookup[id] ?? lookup[`${id}.wav`];
      if (!entry) throw new Error(`no key entry for stimulus ${id}`);
      if (entry.series_id !== result.seriesId)
        throw new Error(`stimulus ${id} belongs to ${entry.series_id}`);
      marks[entry.condition] = value;
    }
    return { series_id: result.seriesId, marks };
  });
  const doc: RatingsDocument = {
    participant: session.participant,
    pages,
    presentation: {
      seed: session.seed,
      series_order: session.pages.map((p) => p.seriesId),
      stimulus_order: Object.fromEntries(
        session.pages.map((p) => [p.seriesId, p.stimuli.map((s) => s.id)]),
      ),
    },
  };
  const problems = validateRatingsDocument(doc);
  if (problems.length > 0) throw new Error(`invalid export: ${problems.join("; ")}`);
  return doc;
}

export interface ExportOutcome {
  uploaded: boolean;
  downloaded: boolean;
}

export async function exportSession(
  doc: RatingsDocument,
  endpoint: string | null,
  download: (filename: string, text: string) => void = browserDownload,
  fetchFn: typeof fetch = fetch,
): Promise<ExportOutcome> {
  const text = JSON.stringify(doc, null, 2);
  if (endpoint) {
    try {
      const resp = await fetchFn(endpoint, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: text,
      });
      if (resp.ok) return { uploaded: true, downloaded: false };
    } catch {
      // unreachable endpoint: fall through to the local download
    }
  }
  download(`ratings_${doc.participant.id}.json`, text);
  return { uploaded: false, downloaded: true };
}

function browserDownload(filename: string, text: string): void {
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}
