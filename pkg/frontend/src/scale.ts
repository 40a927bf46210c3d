// Mapping between workspace coordinates (unbounded, engine units) and
// screen pixels. The fit is recomputed per payload with padding; rigid
// anchoring on the engine side keeps successive frames coherent.

import type { Point } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
  padding: number;
}

export class ScreenScale {
  private scale = 1;
  private centerX = 0;
  private centerY = 0;

  constructor(private viewport: Viewport) {}

  fit(points: Iterable<Point>): void {
    let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
    let any = false;
    for (const p of points) {
      any = true;
      minX = Math.min(minX, p.x);
      maxX = Math.max(maxX, p.x);
      minY = Math.min(minY, p.y);
      maxY = Math.max(maxY, p.y);
    }
    if (!any) return;
    this.centerX = (minX + maxX) / 2;
    this.centerY = (minY + maxY) / 2;
    const spanX = Math.max(maxX - minX, 1e-9);
    const spanY = Math.max(maxY - minY, 1e-9);
    const usableW = this.viewport.width - 2 * this.viewport.padding;
    const usableH = this.viewport.height - 2 * this.viewport.padding;
    this.scale = Math.min(usableW / spanX, usableH / spanY);
  }

  toScreen(p: Point): Point {
    return {
      x: this.viewport.width / 2 + (p.x - this.centerX) * this.scale,
      y: this.viewport.height / 2 - (p.y - this.centerY) * this.scale,
    };
  }

  toWorkspace(p: Point): Point {
    return {
      x: this.centerX + (p.x - this.viewport.width / 2) / this.scale,
      y: this.centerY - (p.y - this.viewport.height / 2) / this.scale,
    };
  }
}
