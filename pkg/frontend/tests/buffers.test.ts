import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { fiberBuffers, highlightSet, sceneBounds, segmentGeometry } from "../src/buffers.js";
import { parseSnapshot, VERTEX_STRIDE } from "../src/snapshot.js";

const sceneText = readFileSync(new URL("./fixtures/scenario1.scene.txt", import.meta.url), "utf-8");
const snap = parseSnapshot(sceneText);

describe("thin-client attribute audit", () => {
  it("buffers equal the snapshot payload value-for-value (no semantic drift)", () => {
    const buffers = fiberBuffers(snap);
    expect(buffers).toHaveLength(snap.fibers.length);
    for (let i = 0; i < buffers.length; i++) {
      const record = snap.fibers[i];
      const buf = buffers[i];
      expect(buf.id).toBe(record.id);
      expect(buf.shape).toBe(record.shape);
      expect(buf.focused).toBe(record.focused);
      expect(buf.culled).toBe(record.culled);
      expect(buf.count).toBe(record.vertices.length / VERTEX_STRIDE);
      for (let k = 0; k < buf.count; k++) {
        const base = k * VERTEX_STRIDE;
        expect(buf.positions[k * 3]).toBe(Math.fround(record.vertices[base]));
        expect(buf.positions[k * 3 + 1]).toBe(Math.fround(record.vertices[base + 1]));
        expect(buf.positions[k * 3 + 2]).toBe(Math.fround(record.vertices[base + 2]));
        expect(buf.colors[k * 4]).toBe(Math.fround(record.vertices[base + 3]));
        expect(buf.colors[k * 4 + 1]).toBe(Math.fround(record.vertices[base + 4]));
        expect(buf.colors[k * 4 + 2]).toBe(Math.fround(record.vertices[base + 5]));
        expect(buf.colors[k * 4 + 3]).toBe(Math.fround(record.vertices[base + 6]));
        expect(buf.radii[k]).toBe(Math.fround(record.vertices[base + 7]));
      }
    }
  });

  it("matches the scenario's expected focus and styling", () => {
    // the run focused CC (0-9), CST (10-19), IFO (40-49); CG/ILF are context
    const focused = highlightSet(snap);
    const expected = new Set([...Array(50).keys()].filter((i) => i < 20 || i >= 40));
    expect(focused).toEqual(expected);

    for (const f of fiberBuffers(snap)) {
      const alpha = f.colors[3];
      if (f.focused) {
        expect(alpha).toBe(1.0);
      } else {
        expect(alpha).toBeCloseTo(0.25, 10);
      }
      if (f.bundle === "IFO") expect(f.shape).toBe("ribbon");
    }
  });

  it("expands polylines into segment soup with copied attributes", () => {
    const buffers = fiberBuffers(snap).slice(0, 2);
    const soup = segmentGeometry(buffers);
    const segments = (buffers[0].count - 1) + (buffers[1].count - 1);
    expect(soup.positions.length).toBe(segments * 6);
    expect(soup.colors.length).toBe(segments * 8);
    // first segment endpoints are the first two vertices of fiber 0
    expect([...soup.positions.slice(0, 3)]).toEqual([...buffers[0].positions.slice(0, 3)]);
    expect([...soup.positions.slice(3, 6)]).toEqual([...buffers[0].positions.slice(3, 6)]);
    expect([...soup.colors.slice(0, 4)]).toEqual([...buffers[0].colors.slice(0, 4)]);
  });

  it("computes scene bounds over unculled fibers only", () => {
    const buffers = fiberBuffers(snap);
    const bounds = sceneBounds(buffers)!;
    for (let a = 0; a < 3; a++) {
      expect(bounds.lo[a]).toBeLessThan(bounds.hi[a]);
    }
    for (const f of buffers) {
      if (f.culled) continue;
      for (let k = 0; k < f.count; k++) {
        for (let a = 0; a < 3; a++) {
          expect(f.positions[k * 3 + a]).toBeGreaterThanOrEqual(bounds.lo[a]);
          expect(f.positions[k * 3 + a]).toBeLessThanOrEqual(bounds.hi[a]);
        }
      }
    }
  });
});
