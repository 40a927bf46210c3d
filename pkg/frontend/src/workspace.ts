// Workspace view: a scatterplot of items (thumbnails when the dataset has
// them, dots otherwise). Dragging stages moves locally; the Update button
// commits the staged batch as one model update. Positions animate between
// revisions; the engine anchors successive layouts, so motion reflects
// model change, not frame change.

import { Client, ApiError } from "./api.js";
import { ScreenScale } from "./scale.js";
import { ViewState } from "./state.js";
import type { Point } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const GLYPH_RADIUS = 7;

export interface WorkspaceOptions {
  width?: number;
  height?: number;
  dataset?: string;
  thumbnails?: boolean;
}

export class Workspace {
  readonly svg: SVGSVGElement;
  readonly updateButton: HTMLButtonElement;
  readonly discardButton: HTMLButtonElement;
  readonly errorBanner: HTMLElement;
  private readonly scale: ScreenScale;
  private glyphs = new Map<string, SVGGElement>();
  private dragging: { itemId: string; moved: boolean } | null = null;

  constructor(
    readonly root: HTMLElement,
    readonly state: ViewState,
    readonly client: Client,
    readonly options: WorkspaceOptions = {},
  ) {
    const width = options.width ?? 640;
    const height = options.height ?? 480;
    this.scale = new ScreenScale({ width, height, padding: 24 });

    this.errorBanner = document.createElement("div");
    this.errorBanner.className = "error-banner";
    this.errorBanner.hidden = true;

    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("width", String(width));
    this.svg.setAttribute("height", String(height));
    this.svg.setAttribute("class", "workspace");

    this.updateButton = document.createElement("button");
    this.updateButton.className = "update-button";
    this.updateButton.textContent = "Update";

    this.discardButton = document.createElement("button");
    this.discardButton.className = "discard-button";
    this.discardButton.textContent = "Discard staged";

    const controls = document.createElement("div");
    controls.className = "workspace-controls";
    controls.append(this.updateButton, this.discardButton);
    root.append(this.errorBanner, this.svg, controls);

    this.updateButton.addEventListener("click", () => void this.commit());
    this.discardButton.addEventListener("click", () => this.state.clearStaged());
    this.svg.addEventListener("pointermove", (e) => this.onPointerMove(e));
    this.svg.addEventListener("pointerup", (e) => this.onPointerUp(e));
    this.svg.addEventListener("pointerleave", () => this.endDrag());

    state.subscribe(() => this.render());
  }

  /** Screen coordinates of one item's glyph (for tests and overlays). */
  glyphElement(itemId: string): SVGGElement | undefined {
    return this.glyphs.get(itemId);
  }

  private eventPoint(event: PointerEvent): Point {
    const rect = this.svg.getBoundingClientRect();
    return { x: event.clientX - rect.left, y: event.clientY - rect.top };
  }

  private onGlyphPointerDown(itemId: string, event: PointerEvent): void {
    event.preventDefault();
    this.dragging = { itemId, moved: false };
  }

  private onPointerMove(event: PointerEvent): void {
    if (!this.dragging) return;
    this.dragging.moved = true;
    const pos = this.scale.toWorkspace(this.eventPoint(event));
    this.state.stageDrag(this.dragging.itemId, pos);
  }

  private onPointerUp(event: PointerEvent): void {
    if (!this.dragging) return;
    const { itemId, moved } = this.dragging;
    this.dragging = null;
    if (moved) {
      const pos = this.scale.toWorkspace(this.eventPoint(event));
      this.state.stageDrag(itemId, pos);
    } else {
      this.state.toggleSelect(itemId);
    }
  }

  private endDrag(): void {
    this.dragging = null;
  }

  async commit(): Promise<void> {
    const snap = this.state.snapshot();
    if (snap.stagedDrags.size < 2 || snap.pending) return;
    const drags = [...snap.stagedDrags.entries()].map(([item_id, p]) => ({
      item_id,
      x: p.x,
      y: p.y,
    }));
    this.state.setPending(true);
    try {
      const result = await this.client.postOli(snap.sessionId, drags);
      if ("positions" in result) {
        this.state.commitApplied(result);
      }
      // 202: staged stays cleared once the revision event lands
      if (!("positions" in result)) {
        this.state.clearStaged();
      }
      this.state.setError(null);
    } catch (error) {
      // staged drags are retained for correction
      const detail = error instanceof ApiError ? error.message : String(error);
      this.state.setError(detail);
    } finally {
      this.state.setPending(false);
    }
  }

  private glyphFor(itemId: string): SVGGElement {
    let glyph = this.glyphs.get(itemId);
    if (glyph) return glyph;
    glyph = document.createElementNS(SVG_NS, "g");
    glyph.setAttribute("class", "glyph");
    glyph.setAttribute("data-item", itemId);
    glyph.style.transition = "transform 300ms ease";
    if (this.options.thumbnails && this.options.dataset) {
      const image = document.createElementNS(SVG_NS, "image");
      image.setAttribute("href", this.client.thumbnailUrl(this.options.dataset, itemId));
      image.setAttribute("x", String(-GLYPH_RADIUS * 2));
      image.setAttribute("y", String(-GLYPH_RADIUS * 2));
      image.setAttribute("width", String(GLYPH_RADIUS * 4));
      image.setAttribute("height", String(GLYPH_RADIUS * 4));
      glyph.append(image);
      const frame = document.createElementNS(SVG_NS, "rect");
      frame.setAttribute("class", "frame");
      frame.setAttribute("x", String(-GLYPH_RADIUS * 2));
      frame.setAttribute("y", String(-GLYPH_RADIUS * 2));
      frame.setAttribute("width", String(GLYPH_RADIUS * 4));
      frame.setAttribute("height", String(GLYPH_RADIUS * 4));
      frame.setAttribute("fill", "none");
      glyph.append(frame);
    } else {
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("class", "frame");
      dot.setAttribute("r", String(GLYPH_RADIUS));
      glyph.append(dot);
    }
    glyph.addEventListener("pointerdown", (e) => this.onGlyphPointerDown(itemId, e));
    glyph.addEventListener("pointerenter", () => this.state.setHover(itemId));
    glyph.addEventListener("pointerleave", () => this.state.setHover(null));
    this.svg.append(glyph);
    this.glyphs.set(itemId, glyph);
    return glyph;
  }

  private render(): void {
    const snap = this.state.snapshot();
    const displayed: Point[] = [];
    for (const id of snap.itemIds) {
      const pos = this.state.displayPosition(id);
      if (pos) displayed.push(pos);
    }
    this.scale.fit(displayed);

    for (const id of snap.itemIds) {
      const pos = this.state.displayPosition(id);
      if (!pos) continue;
      const glyph = this.glyphFor(id);
      const screen = this.scale.toScreen(pos);
      glyph.style.transform = `translate(${screen.x}px, ${screen.y}px)`;
      const staged = snap.stagedDrags.has(id);
      const hovered = snap.hover === id;
      const selected = snap.selection.has(id);
      glyph.classList.toggle("staged", staged);
      glyph.classList.toggle("hovered", hovered);
      glyph.classList.toggle("selected", selected);
      const frame = glyph.querySelector(".frame") as SVGElement | null;
      if (frame) {
        // hover highlight wins over selection, matching the feature view
        frame.setAttribute(
          "stroke",
          hovered ? "#e6c229" : selected ? "#2d6cdf" : staged ? "#888" : "#444",
        );
        frame.setAttribute("stroke-width", hovered || selected ? "3" : "1");
      }
    }

    this.updateButton.disabled = snap.stagedDrags.size < 2 || snap.pending;
    this.updateButton.title =
      snap.stagedDrags.size < 2 ? "stage at least 2 drags to update the model" : "";
    this.discardButton.disabled = snap.stagedDrags.size === 0;
    this.errorBanner.hidden = snap.error === null;
    this.errorBanner.textContent = snap.error ?? "";
  }
}
