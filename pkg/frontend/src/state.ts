// Client-side view state. All committed geometry comes from server
// payloads; the only local mutation is the staged-drag overlay.

import type { LayoutPayload, Point } from "./types.js";

export interface ViewSnapshot {
  sessionId: string;
  lastRevision: number;
  itemIds: string[];
  positions: ReadonlyMap<string, Point>;
  weights: number[];
  stagedDrags: ReadonlyMap<string, Point>;
  selection: ReadonlySet<string>;
  hover: string | null;
  pending: boolean;
  error: string | null;
  warning: string | null;
}

export type Listener = (state: ViewSnapshot) => void;

export class ViewState {
  readonly sessionId: string;
  private lastRevision = -1;
  private itemIds: string[] = [];
  private positions = new Map<string, Point>();
  private weights: number[] = [];
  private stagedDrags = new Map<string, Point>();
  private selection = new Set<string>();
  private hover: string | null = null;
  private pending = false;
  private error: string | null = null;
  private warning: string | null = null;
  private listeners: Listener[] = [];

  constructor(sessionId: string, initial: LayoutPayload) {
    this.sessionId = sessionId;
    this.applyPayload(initial);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    listener(this.snapshot());
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    const snap = this.snapshot();
    for (const listener of this.listeners) listener(snap);
  }

  snapshot(): ViewSnapshot {
    return {
      sessionId: this.sessionId,
      lastRevision: this.lastRevision,
      itemIds: [...this.itemIds],
      positions: this.positions,
      weights: [...this.weights],
      stagedDrags: this.stagedDrags,
      selection: this.selection,
      hover: this.hover,
      pending: this.pending,
      error: this.error,
      warning: this.warning,
    };
  }

  /** Apply a server payload; stale revisions are ignored. */
  applyPayload(payload: LayoutPayload): boolean {
    if (payload.revision <= this.lastRevision) return false;
    this.lastRevision = payload.revision;
    this.positions = new Map(payload.positions.map((p) => [p.item_id, { x: p.x, y: p.y }]));
    this.itemIds = payload.positions.map((p) => p.item_id);
    this.weights = [...payload.weights];
    this.warning = payload.warning ?? null;
    this.emit();
    return true;
  }

  /** Stage a drag locally; same item re-staged keeps the last position. */
  stageDrag(itemId: string, pos: Point): void {
    if (!this.positions.has(itemId)) return;
    this.stagedDrags.set(itemId, pos);
    this.emit();
  }

  /** Abandon staged drags: the server layout is restored untouched. */
  clearStaged(): void {
    if (this.stagedDrags.size === 0) return;
    this.stagedDrags = new Map();
    this.emit();
  }

  /** Called when a commit round-trip succeeds. */
  commitApplied(payload: LayoutPayload): void {
    this.stagedDrags = new Map();
    this.error = null;
    this.applyPayload(payload);
    this.emit();
  }

  get stagedCount(): number {
    return this.stagedDrags.size;
  }

  get canCommit(): boolean {
    return this.stagedDrags.size >= 2 && !this.pending;
  }

  /** Effective display position: staged overlay wins over committed. */
  displayPosition(itemId: string): Point | undefined {
    return this.stagedDrags.get(itemId) ?? this.positions.get(itemId);
  }

  setPending(pending: boolean): void {
    this.pending = pending;
    this.emit();
  }

  setError(message: string | null): void {
    this.error = message;
    this.emit();
  }

  setHover(itemId: string | null): void {
    if (this.hover === itemId) return;
    this.hover = itemId;
    this.emit();
  }

  setSelection(ids: Iterable<string>): void {
    this.selection = new Set(ids);
    this.emit();
  }

  toggleSelect(itemId: string): void {
    if (this.selection.has(itemId)) this.selection.delete(itemId);
    else this.selection.add(itemId);
    this.emit();
  }
}
