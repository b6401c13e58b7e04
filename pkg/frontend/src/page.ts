// One APE page: a unit axis with four anchor labels, one draggable marker and
// one play button per stimulus, and a submit gate that needs every stimulus
// placed and auditioned.

import { PageMarks } from "./marks.js";
import { Player } from "./player.js";
import { SessionPage } from "./session.js";
import { SCALE_ANCHORS } from "./types.js";

export interface TrackGeometry {
  left: number;
  width: number;
}

export interface PageOptions {
  onSubmit: (marks: Record<string, number>) => void;
  /** Injectable for headless tests; defaults to the live client rect. */
  trackGeometry?: () => TrackGeometry;
}

export class PageController {
  readonly marks: PageMarks;
  readonly root: HTMLElement;
  private track!: HTMLElement;
  private errorBox!: HTMLElement;
  private submitButton!: HTMLButtonElement;
  private markerEls = new Map<string, HTMLElement>();
  private failed = new Map<string, string>();

  constructor(
    container: HTMLElement,
    readonly page: SessionPage,
    readonly player: Player,
    private readonly opts: PageOptions,
  ) {
    this.marks = new PageMarks(page.stimuli.map((s) => s.id));
    this.root = this.renderInto(container);
    this.player.onError = (id, message) => this.mediaFailed(id, message);
    this.refresh();
  }

  private geometry(): TrackGeometry {
    if (this.opts.trackGeometry) return this.opts.trackGeometry();
    const rect = this.track.getBoundingClientRect();
    return { left: rect.left, width: rect.width || 1 };
  }

  private renderInto(container: HTMLElement): HTMLElement {
    const root = document.createElement("div");
    root.className = "ape-page";

    const axis = document.createElement("div");
    axis.className = "axis";
    for (const anchor of SCALE_ANCHORS) {
      const tick = document.createElement("span");
      tick.className = "anchor";
      tick.style.left = `${anchor.position * 100}%`;
      tick.dataset.position = String(anchor.position);
      tick.textContent = anchor.label;
      axis.appendChild(tick);
    }
    root.appendChild(axis);

    this.track = document.createElement("div");
    this.track.className = "track";
    root.appendChild(this.track);

    const list = document.createElement("ul");
    list.className = "stimuli";
    this.page.stimuli.forEach((stimulus, index) => {
      const letter = String.fromCharCode(65 + index);

      const marker = document.createElement("div");
      marker.className = "marker unplaced";
      marker.dataset.stimulus = stimulus.id;
      marker.textContent = letter;
      marker.addEventListener("mousedown", (ev) => this.beginDrag(stimulus.id, ev));
      this.track.appendChild(marker);
      this.markerEls.set(stimulus.id, marker);

      const item = document.createElement("li");
      const play = document.createElement("button");
      play.className = "play";
      play.dataset.stimulus = stimulus.id;
      play.textContent = `play ${letter}`;
      play.addEventListener("click", () => void this.playStimulus(stimulus.id));
      item.appendChild(play);
      list.appendChild(item);
    });
    root.appendChild(list);

    this.errorBox = document.createElement("div");
    this.errorBox.className = "errors";
    root.appendChild(this.errorBox);

    this.submitButton = document.createElement("button");
    this.submitButton.className = "submit";
    this.submitButton.textContent = "submit page";
    this.submitButton.addEventListener("click", () => this.trySubmit());
    root.appendChild(this.submitButton);

    container.appendChild(root);
    return root;
  }

  private beginDrag(id: string, ev: MouseEvent): void {
    ev.preventDefault();
    const move = (e: MouseEvent) => this.dragTo(id, e.clientX);
    const up = () => {
      document.removeEventListener("mousemove", move);
      document.removeEventListener("mouseup", up);
    };
    document.addEventListener("mousemove", move);
    document.addEventListener("mouseup", up);
    this.dragTo(id, ev.clientX);
  }

  dragTo(id: string, clientX: number): number {
    const geo = this.geometry();
    const position = this.marks.place(id, (clientX - geo.left) / geo.width);
    const marker = this.markerEls.get(id)!;
    marker.classList.remove("unplaced");
    marker.style.left = `${position * 100}%`;
    this.refresh();
    return position;
  }

  async playStimulus(id: string): Promise<void> {
    const stimulus = this.page.stimuli.find((s) => s.id === id);
    if (!stimulus) throw new Error(`unknown stimulus ${id}`);
    try {
      await this.player.play(id, stimulus.url);
      this.marks.notePlayed(id);
    } catch {
      // mediaFailed() has already surfaced the problem
    }
    this.refresh();
  }

  private mediaFailed(id: string, message: string): void {
    this.failed.set(id, message);
    this.refresh();
  }

  get submitEnabled(): boolean {
    return this.marks.status().complete && this.failed.size === 0;
  }

  private refresh(): void {
    this.submitButton.disabled = !this.submitEnabled;
    if (this.failed.size > 0) {
      const lines = [...this.failed.entries()].map(
        ([id, msg]) => `stimulus ${id}: ${msg}`,
      );
      this.errorBox.textContent = `media failed to load - ${lines.join("; ")}`;
    } else {
      this.errorBox.textContent = "";
    }
  }

  trySubmit(): boolean {
    if (!this.submitEnabled) return false;
    this.player.stop();
    this.opts.onSubmit(this.marks.record());
    return true;
  }
}

export function renderPage(
  container: HTMLElement,
  page: SessionPage,
  player: Player,
  opts: PageOptions,
): PageController {
  return new PageController(container, page, player, opts);
}
