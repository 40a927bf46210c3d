// Feature view: one slider per feature weight, knob position linear in the
// weight over [floor, n_features]. Releasing a knob issues exactly one
// weight update; a maximize control gives the feature a dominant share.
// Hovering or selecting items in the workspace overlays circle glyphs at
// those items' feature values along each slider track.

import { Client, ApiError } from "./api.js";
import { ViewState } from "./state.js";
import { WEIGHT_FLOOR } from "./types.js";

const SLIDER_STEPS = 1000;

export class FeatureView {
  readonly rows: HTMLElement[] = [];
  readonly sliders: HTMLInputElement[] = [];
  private draggingIndex: number | null = null;
  private featureValues = new Map<string, number[]>();

  constructor(
    readonly root: HTMLElement,
    readonly state: ViewState,
    readonly client: Client,
  ) {
    const snap = state.snapshot();
    const d = snap.weights.length;
    for (let k = 0; k < d; k++) {
      const row = document.createElement("div");
      row.className = "feature-row";
      const label = document.createElement("span");
      label.className = "feature-label";
      label.textContent = `f${k}`;

      const track = document.createElement("div");
      track.className = "feature-track";
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = String(SLIDER_STEPS);
      slider.step = "1";
      slider.addEventListener("input", () => {
        this.draggingIndex = k;
      });
      slider.addEventListener("change", () => {
        this.draggingIndex = null;
        void this.submit(k, this.sliderToWeight(slider.valueAsNumber));
      });
      track.append(slider);

      const glyphs = document.createElement("div");
      glyphs.className = "feature-glyphs";
      track.append(glyphs);

      const maximize = document.createElement("button");
      maximize.className = "maximize-button";
      maximize.textContent = "max";
      maximize.title = "give this feature 90% of the weight mass";
      maximize.addEventListener("click", () => void this.maximize(k));

      row.append(label, track, maximize);
      root.append(row);
      this.rows.push(row);
      this.sliders.push(slider);
    }
    state.subscribe(() => this.render());
  }

  sliderToWeight(step: number): number {
    const d = this.state.snapshot().weights.length;
    return WEIGHT_FLOOR + (step / SLIDER_STEPS) * (d - WEIGHT_FLOOR);
  }

  weightToSlider(weight: number): number {
    const d = this.state.snapshot().weights.length;
    return Math.round(((weight - WEIGHT_FLOOR) / (d - WEIGHT_FLOOR)) * SLIDER_STEPS);
  }

  private async submit(index: number, value: number): Promise<void> {
    const snap = this.state.snapshot();
    this.state.setPending(true);
    try {
      const result = await this.client.putWeight(snap.sessionId, index, value);
      if ("positions" in result) this.state.commitApplied(result);
      this.state.setError(null);
    } catch (error) {
      // rejected edits revert the knob to the authoritative weights
      const detail = error instanceof ApiError ? error.message : String(error);
      this.state.setError(detail);
      this.render();
    } finally {
      this.state.setPending(false);
    }
  }

  private async maximize(index: number): Promise<void> {
    const snap = this.state.snapshot();
    this.state.setPending(true);
    try {
      const result = await this.client.maximizeWeight(snap.sessionId, index);
      if ("positions" in result) this.state.commitApplied(result);
      this.state.setError(null);
    } catch (error) {
      const detail = error instanceof ApiError ? error.message : String(error);
      this.state.setError(detail);
    } finally {
      this.state.setPending(false);
    }
  }

  /** Cache one item's feature values for glyph overlays. */
  async ensureFeatureValues(itemId: string): Promise<number[] | undefined> {
    if (this.featureValues.has(itemId)) return this.featureValues.get(itemId);
    try {
      const response = await fetch(
        `${this.client.baseUrl}/sessions/${this.state.sessionId}/items/${itemId}/features`,
      );
      if (!response.ok) return undefined;
      const body = (await response.json()) as { values: number[] };
      this.featureValues.set(itemId, body.values);
      this.render();
      return body.values;
    } catch {
      return undefined;
    }
  }

  private render(): void {
    const snap = this.state.snapshot();
    snap.weights.forEach((weight, k) => {
      const slider = this.sliders[k];
      if (!slider) return;
      // last-writer-wins: a knob mid-drag keeps following the pointer,
      // every other knob snaps to the authoritative weights
      if (this.draggingIndex !== k) {
        slider.valueAsNumber = this.weightToSlider(weight);
      }
    });

    const overlayIds = new Set<string>(snap.selection);
    if (snap.hover) overlayIds.add(snap.hover);
    for (const id of overlayIds) void this.ensureFeatureValues(id);

    this.rows.forEach((row, k) => {
      const glyphBox = row.querySelector(".feature-glyphs") as HTMLElement | null;
      if (!glyphBox) return;
      glyphBox.textContent = "";
      for (const id of overlayIds) {
        const values = this.featureValues.get(id);
        const value = values?.[k];
        if (value === undefined) continue;
        const glyph = document.createElement("span");
        glyph.className = "value-glyph " + (id === snap.hover ? "hover-glyph" : "select-glyph");
        glyph.style.left = `${(value * 100).toFixed(1)}%`;
        glyph.style.background = id === snap.hover ? "#e6c229" : "#2d6cdf";
        glyph.title = `${id}: ${value.toFixed(3)}`;
        glyphBox.append(glyph);
      }
    });
  }
}
