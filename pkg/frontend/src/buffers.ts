/**
 * Pure conversion from parsed snapshots to GPU-ready attribute buffers.
 *
 * This is the audited boundary of the thin-client contract: every value in
 * these buffers is copied from the snapshot payload, never recomputed, so a
 * payload-to-buffer comparison can prove the client adds no semantics.
 */

import { FiberRecord, MeshRecord, Snapshot, VERTEX_STRIDE, MESH_VERTEX_STRIDE } from "./snapshot.js";

export interface FiberBuffers {
  id: number;
  bundle: string;
  shape: FiberRecord["shape"];
  focused: boolean;
  culled: boolean;
  count: number;
  positions: Float32Array; // xyz per vertex
  colors: Float32Array;    // rgba per vertex
  radii: Float32Array;
}

export function fiberBuffers(snapshot: Snapshot): FiberBuffers[] {
  return snapshot.fibers.map((f) => {
    const count = f.vertices.length / VERTEX_STRIDE;
    const positions = new Float32Array(count * 3);
    const colors = new Float32Array(count * 4);
    const radii = new Float32Array(count);
    for (let k = 0; k < count; k++) {
      const base = k * VERTEX_STRIDE;
      positions[k * 3] = f.vertices[base];
      positions[k * 3 + 1] = f.vertices[base + 1];
      positions[k * 3 + 2] = f.vertices[base + 2];
      colors[k * 4] = f.vertices[base + 3];
      colors[k * 4 + 1] = f.vertices[base + 4];
      colors[k * 4 + 2] = f.vertices[base + 5];
      colors[k * 4 + 3] = f.vertices[base + 6];
      radii[k] = f.vertices[base + 7];
    }
    return { id: f.id, bundle: f.bundle, shape: f.shape, focused: f.focused, culled: f.culled, count, positions, colors, radii };
  });
}

/** Focused (highlighted) fiber ids in the snapshot. */
export function highlightSet(snapshot: Snapshot): Set<number> {
  return new Set(snapshot.fibers.filter((f) => f.focused).map((f) => f.id));
}

/**
 * Expand unculled fiber polylines into a single line-segment soup
 * (two endpoints per segment) for one draw call.
 */
export function segmentGeometry(fibers: FiberBuffers[]): { positions: Float32Array; colors: Float32Array } {
  let segments = 0;
  for (const f of fibers) {
    if (!f.culled && f.count >= 2) segments += f.count - 1;
  }
  const positions = new Float32Array(segments * 6);
  const colors = new Float32Array(segments * 8);
  let p = 0;
  let c = 0;
  for (const f of fibers) {
    if (f.culled) continue;
    for (let k = 0; k + 1 < f.count; k++) {
      positions.set(f.positions.subarray(k * 3, k * 3 + 6), p);
      colors.set(f.colors.subarray(k * 4, k * 4 + 8), c);
      p += 6;
      c += 8;
    }
  }
  return { positions, colors };
}

export function meshGeometry(mesh: MeshRecord): {
  positions: Float32Array;
  normals: Float32Array;
  colors: Float32Array;
  indices: Uint32Array;
} {
  const count = mesh.vertices.length / MESH_VERTEX_STRIDE;
  const positions = new Float32Array(count * 3);
  const normals = new Float32Array(count * 3);
  const colors = new Float32Array(count * 4);
  for (let k = 0; k < count; k++) {
    const base = k * MESH_VERTEX_STRIDE;
    positions[k * 3] = mesh.vertices[base];
    positions[k * 3 + 1] = mesh.vertices[base + 1];
    positions[k * 3 + 2] = mesh.vertices[base + 2];
    normals[k * 3] = mesh.vertices[base + 3];
    normals[k * 3 + 1] = mesh.vertices[base + 4];
    normals[k * 3 + 2] = mesh.vertices[base + 5];
    colors[k * 4] = mesh.vertices[base + 6];
    colors[k * 4 + 1] = mesh.vertices[base + 7];
    colors[k * 4 + 2] = mesh.vertices[base + 8];
    colors[k * 4 + 3] = mesh.vertices[base + 9];
  }
  return { positions, normals, colors, indices: mesh.triangles };
}

/** Axis-aligned bounds over all unculled vertices; null for an empty scene. */
export function sceneBounds(fibers: FiberBuffers[]): { lo: [number, number, number]; hi: [number, number, number] } | null {
  let seen = false;
  const lo: [number, number, number] = [Infinity, Infinity, Infinity];
  const hi: [number, number, number] = [-Infinity, -Infinity, -Infinity];
  for (const f of fibers) {
    if (f.culled) continue;
    for (let k = 0; k < f.count; k++) {
      seen = true;
      for (let a = 0; a < 3; a++) {
        const v = f.positions[k * 3 + a];
        if (v < lo[a]) lo[a] = v;
        if (v > hi[a]) hi[a] = v;
      }
    }
  }
  return seen ? { lo, hi } : null;
}
