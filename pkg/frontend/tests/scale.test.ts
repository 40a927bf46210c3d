import { describe, expect, it } from "vitest";

import { ScreenScale } from "../src/scale.js";

describe("ScreenScale", () => {
  it("round-trips workspace coordinates through the screen", () => {
    const scale = new ScreenScale({ width: 640, height: 480, padding: 24 });
    const points = [
      { x: -2, y: -1 },
      { x: 3, y: 2 },
      { x: 0.5, y: 0.25 },
    ];
    scale.fit(points);
    for (const p of points) {
      const back = scale.toWorkspace(scale.toScreen(p));
      expect(back.x).toBeCloseTo(p.x, 9);
      expect(back.y).toBeCloseTo(p.y, 9);
    }
  });

  it("keeps every fitted point inside the padded viewport", () => {
    const scale = new ScreenScale({ width: 200, height: 100, padding: 10 });
    const points = [
      { x: -50, y: 0 },
      { x: 50, y: 7 },
      { x: 0, y: -7 },
    ];
    scale.fit(points);
    for (const p of points) {
      const s = scale.toScreen(p);
      expect(s.x).toBeGreaterThanOrEqual(10 - 1e-9);
      expect(s.x).toBeLessThanOrEqual(190 + 1e-9);
      expect(s.y).toBeGreaterThanOrEqual(10 - 1e-9);
      expect(s.y).toBeLessThanOrEqual(90 + 1e-9);
    }
  });

  it("screen y axis points down while workspace y points up", () => {
    const scale = new ScreenScale({ width: 100, height: 100, padding: 0 });
    scale.fit([
      { x: 0, y: 0 },
      { x: 0, y: 1 },
    ]);
    expect(scale.toScreen({ x: 0, y: 1 }).y).toBeLessThan(scale.toScreen({ x: 0, y: 0 }).y);
  });
});
