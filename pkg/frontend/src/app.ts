// Session runner: one page at a time, then export.

import { buildRatingsDocument, exportSession, ExportOutcome, PageResult } from "./export.js";
import { renderPage } from "./page.js";
import { Player } from "./player.js";
import { TestSession } from "./session.js";
import { TrackGeometry } from "./page.js";
import { StimulusKey } from "./types.js";

export interface AppOptions {
  endpoint: string | null;
  trackGeometry?: () => TrackGeometry;
  download?: (filename: string, text: string) => void;
  fetchFn?: typeof fetch;
  onDone?: (outcome: ExportOutcome) => void;
  /** Blind-index mode: fetch the id -> condition key only at export time. */
  loadKey?: () => Promise<StimulusKey>;
}

export class SessionApp {
  results: PageResult[] = [];
  pageIndex = 0;

  constructor(
    readonly container: HTMLElement,
    readonly session: TestSession,
    readonly player: Player,
    readonly opts: AppOptions,
  ) {}

  start(): void {
    this.showPage();
  }

  private showPage(): void {
    this.container.textContent = "";
    const page = this.session.pages[this.pageIndex];
    const header = document.createElement("h2");
    header.textContent = `page ${this.pageIndex + 1} of ${this.session.pages.length}`;
    this.container.appendChild(header);
    renderPage(this.container, page, this.player, {
      trackGeometry: this.opts.trackGeometry,
      onSubmit: (marks) => {
        this.results.push({ seriesId: page.seriesId, marks });
        this.pageIndex += 1;
        if (this.pageIndex < this.session.pages.length) {
          this.showPage();
        } else {
          void this.finish();
        }
      },
    });
  }

  private async finish(): Promise<void> {
    this.container.textContent = "";
    const key = this.session.key ?? (await this.opts.loadKey?.());
    const doc = buildRatingsDocument(this.session, this.results, key);
    const outcome = await exportSession(
      doc,
      this.opts.endpoint,
      this.opts.download,
      this.opts.fetchFn,
    );
    const note = document.createElement("p");
    note.className = "done";
    note.textContent = outcome.uploaded
      ? "ratings uploaded - thank you!"
      : "ratings saved as a local download - thank you!";
    this.container.appendChild(note);
    this.opts.onDone?.(outcome);
  }
}
