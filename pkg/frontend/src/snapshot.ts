/**
 * Parser for the engine's scene snapshot payload (the `scene` endpoint).
 *
 * The payload is line oriented: header (generation, view), plane records,
 * per-fiber records with 8-value vertex rows (x y z r g b a radius), and an
 * optional mesh section. The studio never derives visual attributes itself;
 * everything rendered comes verbatim from this document.
 */

export interface PlaneInfo {
  name: string;
  axis: "x" | "y" | "z";
  position: number;
  enabled: boolean;
}

export interface FiberRecord {
  id: number;
  bundle: string;
  shape: "line" | "tube" | "ribbon";
  focused: boolean;
  culled: boolean;
  /** stride 8: x y z r g b a radius; empty for culled fibers */
  vertices: Float64Array;
}

export interface MeshRecord {
  fiberId: number;
  /** stride 10: x y z nx ny nz r g b a */
  vertices: Float64Array;
  triangles: Uint32Array;
}

export interface Snapshot {
  generation: number;
  view: [number, number, number];
  planes: PlaneInfo[];
  fibers: FiberRecord[];
  meshes: MeshRecord[] | null;
}

export const VERTEX_STRIDE = 8;
export const MESH_VERTEX_STRIDE = 10;

class Reader {
  private lines: string[];
  private pos = 0;

  constructor(text: string) {
    this.lines = text.split("\n");
  }

  next(expect: string): string[] {
    while (this.pos < this.lines.length && this.lines[this.pos].trim() === "") {
      this.pos += 1;
    }
    if (this.pos >= this.lines.length) {
      throw new Error(`snapshot truncated, expected ${expect}`);
    }
    return this.lines[this.pos++].split(" ");
  }
}

function num(text: string, what: string): number {
  const value = Number(text);
  if (!Number.isFinite(value)) {
    throw new Error(`bad snapshot: ${what} is not numeric (${text})`);
  }
  return value;
}

export function parseSnapshot(text: string): Snapshot {
  const reader = new Reader(text);
  const magic = reader.next("header");
  if (magic[0] !== "zfzscene" || magic[1] !== "1") {
    throw new Error("not a scene snapshot payload");
  }
  const generation = num(reader.next("generation")[1], "generation");
  const viewParts = reader.next("view");
  const view: [number, number, number] = [
    num(viewParts[1], "view.x"),
    num(viewParts[2], "view.y"),
    num(viewParts[3], "view.z"),
  ];

  const planeCount = num(reader.next("planes")[1], "plane count");
  const planes: PlaneInfo[] = [];
  for (let i = 0; i < planeCount; i++) {
    // plane <name> axis <x|y|z> position <f> enabled <0|1>
    const p = reader.next("plane record");
    planes.push({
      name: p[1],
      axis: p[3] as PlaneInfo["axis"],
      position: num(p[5], "plane position"),
      enabled: p[7] === "1",
    });
  }

  const fiberCount = num(reader.next("fibers")[1], "fiber count");
  const fibers: FiberRecord[] = [];
  for (let i = 0; i < fiberCount; i++) {
    // fiber <id> bundle <tag> shape <s> focus <0|1> culled <0|1> vertices <n>
    const f = reader.next("fiber record");
    const nverts = num(f[11], "vertex count");
    const vertices = new Float64Array(nverts * VERTEX_STRIDE);
    for (let k = 0; k < nverts; k++) {
      const row = reader.next("vertex row");
      if (row[0] !== "v") throw new Error("bad snapshot: expected vertex row");
      for (let c = 0; c < VERTEX_STRIDE; c++) {
        vertices[k * VERTEX_STRIDE + c] = num(row[c + 1], "vertex field");
      }
    }
    fibers.push({
      id: num(f[1], "fiber id"),
      bundle: f[3],
      shape: f[5] as FiberRecord["shape"],
      focused: f[7] === "1",
      culled: f[9] === "1",
      vertices,
    });
  }

  let meshes: MeshRecord[] | null = null;
  let tail = reader.next("meshes or end");
  if (tail[0] === "meshes") {
    meshes = [];
    const meshCount = num(tail[1], "mesh count");
    for (let i = 0; i < meshCount; i++) {
      const m = reader.next("mesh record");
      const nv = num(m[3], "mesh vertex count");
      const nt = num(m[5], "mesh triangle count");
      const vertices = new Float64Array(nv * MESH_VERTEX_STRIDE);
      for (let k = 0; k < nv; k++) {
        const row = reader.next("mesh vertex");
        for (let c = 0; c < MESH_VERTEX_STRIDE; c++) {
          vertices[k * MESH_VERTEX_STRIDE + c] = num(row[c + 1], "mesh vertex field");
        }
      }
      const triangles = new Uint32Array(nt * 3);
      for (let k = 0; k < nt; k++) {
        const row = reader.next("mesh triangle");
        triangles[k * 3] = num(row[1], "triangle index");
        triangles[k * 3 + 1] = num(row[2], "triangle index");
        triangles[k * 3 + 2] = num(row[3], "triangle index");
      }
      meshes.push({ fiberId: num(m[1], "mesh fiber id"), vertices, triangles });
    }
    tail = reader.next("end");
  }
  if (tail[0] !== "end") {
    throw new Error("bad snapshot: missing end marker");
  }
  return { generation, view, planes, fibers, meshes };
}
