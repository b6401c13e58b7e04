// Mark state for one page: continuous positions on [0, 1], play tracking,
// and the completeness rule that gates submission.

export interface PageStatus {
  complete: boolean;
  unplaced: string[];
  unplayed: string[];
}

export class PageMarks {
  private positions = new Map<string, number>();
  private played = new Set<string>();

  constructor(public readonly stimulusIds: readonly string[]) {}

  place(id: string, position: number): number {
    if (!this.stimulusIds.includes(id)) throw new Error(`unknown stimulus ${id}`);
    const clamped = Math.min(1, Math.max(0, position));
    this.positions.set(id, clamped);
    return clamped;
  }

  positionOf(id: string): number | undefined {
    return this.positions.get(id);
  }

  notePlayed(id: string): void {
    this.played.add(id);
  }

  hasPlayed(id: string): boolean {
    return this.played.has(id);
  }

  status(): PageStatus {
    const unplaced = this.stimulusIds.filter((id) => !this.positions.has(id));
    const unplayed = this.stimulusIds.filter((id) => !this.played.has(id));
    return {
      complete: unplaced.length === 0 && unplayed.length === 0,
      unplaced,
      unplayed,
    };
  }

  /** Marks keyed by stimulus id; only valid once status().complete. */
  record(): Record<string, number> {
    const status = this.status();
    if (!status.complete) {
      const missing = [
        ...status.unplaced.map((s) => `${s} (unplaced)`),
        ...status.unplayed.map((s) => `${s} (unplayed)`),
      ];
      throw new Error(`incomplete page: ${missing.join(", ")}`);
    }
    return Object.fromEntries(this.positions);
  }
}
