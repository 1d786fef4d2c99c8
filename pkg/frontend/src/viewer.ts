/**
 * WebGL fiber viewport: renders snapshot buffers verbatim (polylines at
 * attributes detail, server-tessellated meshes at meshes detail), draws
 * enabled cutting planes as translucent quads, and reports camera-view
 * changes so depth cues can be refetched server-side.
 */

import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import { fiberBuffers, meshGeometry, sceneBounds, segmentGeometry } from "./buffers.js";
import { Snapshot } from "./snapshot.js";
import { ViewerPort } from "./studio.js";

const LINE_SHADER = {
  vertex: `
    attribute vec4 rgba;
    varying vec4 vColor;
    void main() {
      vColor = rgba;
      gl_Position = projectionMatrix * modelViewMatrix * vec4(position, 1.0);
    }
  `,
  fragment: `
    varying vec4 vColor;
    void main() { gl_FragColor = vColor; }
  `,
};

const MESH_SHADER = {
  vertex: `
    attribute vec4 rgba;
    varying vec4 vColor;
    varying vec3 vNormal;
    void main() {
      vColor = rgba;
      vNormal = normalMatrix * normal;
      gl_Position = projectionMatrix * modelViewMatrix * vec4(position, 1.0);
    }
  `,
  fragment: `
    varying vec4 vColor;
    varying vec3 vNormal;
    void main() {
      float shade = 0.55 + 0.45 * abs(normalize(vNormal).z);
      gl_FragColor = vec4(vColor.rgb * shade, vColor.a);
    }
  `,
};

const PLANE_COLORS: Record<string, number> = {
  sagittal: 0xd95f5f,
  coronal: 0x5fd97a,
  axial: 0x5f8fd9,
};

export class FiberViewer implements ViewerPort {
  private scene = new THREE.Scene();
  private camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer;
  private controls: OrbitControls;
  private content = new THREE.Group();
  private fitted = false;
  private viewTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(container: HTMLElement, private onViewChange: () => void) {
    this.scene.background = new THREE.Color(0x10141a);
    this.camera = new THREE.PerspectiveCamera(
      50, container.clientWidth / Math.max(container.clientHeight, 1), 0.1, 5000,
    );
    this.camera.position.set(0, -220, 80);
    this.camera.up.set(0, 0, 1);
    this.renderer = new THREE.WebGLRenderer({ antialias: true });
    this.renderer.setSize(container.clientWidth, container.clientHeight);
    container.appendChild(this.renderer.domElement);

    this.controls = new OrbitControls(this.camera, this.renderer.domElement);
    // camera moves change depth cues: debounce, then let the studio refetch
    this.controls.addEventListener("end", () => {
      if (this.viewTimer !== null) clearTimeout(this.viewTimer);
      this.viewTimer = setTimeout(() => this.onViewChange(), 250);
    });

    this.scene.add(this.content);
    new ResizeObserver(() => {
      const w = container.clientWidth;
      const h = Math.max(container.clientHeight, 1);
      this.camera.aspect = w / h;
      this.camera.updateProjectionMatrix();
      this.renderer.setSize(w, h);
    }).observe(container);

    const animate = () => {
      requestAnimationFrame(animate);
      this.controls.update();
      this.renderer.render(this.scene, this.camera);
    };
    animate();
  }

  viewDirection(): [number, number, number] {
    const dir = new THREE.Vector3();
    this.camera.getWorldDirection(dir);
    return [dir.x, dir.y, dir.z];
  }

  showScene(snapshot: Snapshot): void {
    this.content.clear();
    const fibers = fiberBuffers(snapshot);

    const meshed = new Set<number>();
    if (snapshot.meshes !== null) {
      for (const mesh of snapshot.meshes) {
        meshed.add(mesh.fiberId);
        const data = meshGeometry(mesh);
        const geometry = new THREE.BufferGeometry();
        geometry.setAttribute("position", new THREE.BufferAttribute(data.positions, 3));
        geometry.setAttribute("normal", new THREE.BufferAttribute(data.normals, 3));
        geometry.setAttribute("rgba", new THREE.BufferAttribute(data.colors, 4));
        geometry.setIndex(new THREE.BufferAttribute(data.indices, 1));
        const material = new THREE.ShaderMaterial({
          vertexShader: MESH_SHADER.vertex,
          fragmentShader: MESH_SHADER.fragment,
          transparent: true,
          side: THREE.DoubleSide,
        });
        this.content.add(new THREE.Mesh(geometry, material));
      }
    }

    const asLines = fibers.filter((f) => !f.culled && !meshed.has(f.id));
    if (asLines.length > 0) {
      const soup = segmentGeometry(asLines);
      const geometry = new THREE.BufferGeometry();
      geometry.setAttribute("position", new THREE.BufferAttribute(soup.positions, 3));
      geometry.setAttribute("rgba", new THREE.BufferAttribute(soup.colors, 4));
      const material = new THREE.ShaderMaterial({
        vertexShader: LINE_SHADER.vertex,
        fragmentShader: LINE_SHADER.fragment,
        transparent: true,
      });
      this.content.add(new THREE.LineSegments(geometry, material));
    }

    const bounds = sceneBounds(fibers);
    if (bounds !== null) {
      for (const plane of snapshot.planes) {
        if (!plane.enabled) continue;
        this.content.add(this.planeQuad(plane.axis, plane.position, bounds));
      }
      if (!this.fitted) {
        this.fit(bounds);
        this.fitted = true;
      }
    }
  }

  private planeQuad(
    axis: "x" | "y" | "z",
    position: number,
    bounds: { lo: [number, number, number]; hi: [number, number, number] },
  ): THREE.Mesh {
    const axisIndex = { x: 0, y: 1, z: 2 }[axis];
    const others = [0, 1, 2].filter((a) => a !== axisIndex);
    const sizes = others.map((a) => (bounds.hi[a] - bounds.lo[a]) * 1.15 + 1);
    const centers = others.map((a) => (bounds.hi[a] + bounds.lo[a]) / 2);

    const geometry = new THREE.PlaneGeometry(sizes[0], sizes[1]);
    const material = new THREE.MeshBasicMaterial({
      color: PLANE_COLORS[axis === "x" ? "sagittal" : axis === "y" ? "coronal" : "axial"],
      transparent: true,
      opacity: 0.18,
      side: THREE.DoubleSide,
      depthWrite: false,
    });
    const quad = new THREE.Mesh(geometry, material);
    // PlaneGeometry lies in local xy; rotate its normal onto the cut axis.
    if (axis === "x") quad.rotation.y = Math.PI / 2;
    if (axis === "y") quad.rotation.x = Math.PI / 2;
    const pos: [number, number, number] = [0, 0, 0];
    pos[axisIndex] = position;
    pos[others[0]] = centers[0];
    pos[others[1]] = centers[1];
    quad.position.set(pos[0], pos[1], pos[2]);
    return quad;
  }

  private fit(bounds: { lo: [number, number, number]; hi: [number, number, number] }): void {
    const center = new THREE.Vector3(
      (bounds.lo[0] + bounds.hi[0]) / 2,
      (bounds.lo[1] + bounds.hi[1]) / 2,
      (bounds.lo[2] + bounds.hi[2]) / 2,
    );
    const span = Math.max(
      bounds.hi[0] - bounds.lo[0],
      bounds.hi[1] - bounds.lo[1],
      bounds.hi[2] - bounds.lo[2],
    );
    this.controls.target.copy(center);
    this.camera.position.set(center.x, center.y - span * 1.6, center.z + span * 0.5);
    this.controls.update();
  }
}
