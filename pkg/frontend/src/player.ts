// Exclusive audio playback: starting one stimulus always stops the previous.

export interface Player {
  play(id: string, url: string): Promise<void>;
  stop(): void;
  readonly playingId: string | null;
  onError?: (id: string, message: string) => void;
}

export class HtmlAudioPlayer implements Player {
  private element: HTMLAudioElement | null = null;
  playingId: string | null = null;
  onError?: (id: string, message: string) => void;

  async play(id: string, url: string): Promise<void> {
    this.stop();
    const el = new Audio(url);
    this.element = el;
    this.playingId = id;
    el.addEventListener("ended", () => {
      if (this.playingId === id) this.playingId = null;
    });
    try {
      await el.play();
    } catch (err) {
      this.playingId = null;
      this.element = null;
      this.onError?.(id, err instanceof Error ? err.message : String(err));
      throw err;
    }
  }

  stop(): void {
    if (this.element) {
      this.element.pause();
      this.element = null;
    }
    this.playingId = null;
  }
}

/** Test double: records playback without touching real audio. */
export class RecordingPlayer implements Player {
  playingId: string | null = null;
  log: string[] = [];
  failFor = new Set<string>();
  onError?: (id: string, message: string) => void;

  async play(id: string, _url: string): Promise<void> {
    this.stop();
    if (this.failFor.has(id)) {
      this.onError?.(id, "media failed to load");
      throw new Error("media failed to load");
    }
    this.playingId = id;
    this.log.push(id);
  }

  stop(): void {
    this.playingId = null;
  }
}
