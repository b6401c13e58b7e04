// Bootstrap: participant intake form, manifest loading, session start.

import { SessionApp } from "./app.js";
import { HtmlAudioPlayer } from "./player.js";
import { buildSession } from "./session.js";
import { BlindSeries, Participant, SeriesManifest, StimulusKey } from "./types.js";

const MANIFEST_URL = "stimuli/series_index.json";
const KEY_URL = "stimuli/key.json";
const ENDPOINT = new URLSearchParams(location.search).get("endpoint");

function readParticipant(form: HTMLFormElement): Participant {
  const data = new FormData(form);
  return {
    id: String(data.get("id") || "").trim(),
    experience: {
      critical_listening: data.get("critical_listening") === "on",
      years_music: Number(data.get("years_music") || 0),
      years_engineering: Number(data.get("years_engineering") || 0),
      years_sound_design: Number(data.get("years_sound_design") || 0),
    },
    headphones: String(data.get("headphones") || "").trim(),
  };
}

async function loadManifests(): Promise<Array<SeriesManifest | BlindSeries>> {
  const resp = await fetch(MANIFEST_URL);
  if (!resp.ok) throw new Error(`cannot load ${MANIFEST_URL}: ${resp.status}`);
  return (await resp.json()) as Array<SeriesManifest | BlindSeries>;
}

async function loadKey(): Promise<StimulusKey> {
  const resp = await fetch(KEY_URL);
  if (!resp.ok) throw new Error(`cannot load ${KEY_URL}: ${resp.status}`);
  return (await resp.json()) as StimulusKey;
}

export async function boot(): Promise<void> {
  const form = document.querySelector<HTMLFormElement>("#intake")!;
  const stage = document.querySelector<HTMLElement>("#stage")!;
  form.addEventListener("submit", async (ev) => {
    ev.preventDefault();
    const participant = readParticipant(form);
    if (!participant.id) {
      alert("please enter a participant id");
      return;
    }
    const manifests = await loadManifests();
    const seed = (Date.now() ^ (Math.random() * 0xffffffff)) >>> 0;
    const session = buildSession(participant, manifests, seed);
    form.hidden = true;
    new SessionApp(stage, session, new HtmlAudioPlayer(), {
      endpoint: ENDPOINT,
      loadKey,
    }).start();
  });
}

if (typeof document !== "undefined" && document.querySelector("#intake")) {
  void boot();
}
