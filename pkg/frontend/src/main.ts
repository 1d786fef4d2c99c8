/** DOM bootstrap: binds the studio core to the editor, console, output pane,
 * file upload, and the WebGL viewport. */

import { HttpApi } from "./api.js";
import { levelClass } from "./output.js";
import { StudioCore } from "./studio.js";
import { FiberViewer } from "./viewer.js";

const DEMO_SCRIPT = `LOAD "uploaded:model1"
SELECT "CC,CST,IFO"
UPDATE size BY FA IN "CST"
UPDATE depth BY color IN "CC"
UPDATE shape BY ribbon IN "IFO"
`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function boot(): void {
  const editor = el<HTMLTextAreaElement>("editor");
  const markerPane = el<HTMLDivElement>("markers");
  const outputPane = el<HTMLDivElement>("output");
  const statusBar = el<HTMLDivElement>("status");
  const consoleInput = el<HTMLInputElement>("console");
  const runButton = el<HTMLButtonElement>("run");
  const uploadInput = el<HTMLInputElement>("upload");
  const meshToggle = el<HTMLInputElement>("meshes");

  editor.value = DEMO_SCRIPT;

  const api = new HttpApi("");
  const viewer = new FiberViewer(el<HTMLDivElement>("viewport"), () => {
    studio.viewChanged().catch(showError);
  });

  const studio = new StudioCore(api, viewer, {
    onOutput(added) {
      for (const row of added) {
        const div = document.createElement("div");
        div.className = `log-row ${levelClass(row.level)}` + (row.highlight ? " log-highlight" : "");
        div.textContent = `${row.level}: ${row.text}`;
        outputPane.appendChild(div);
      }
      outputPane.scrollTop = outputPane.scrollHeight;
    },
    onMarkers(markers) {
      markerPane.replaceChildren();
      for (const m of markers) {
        const div = document.createElement("div");
        div.className = `marker marker-${m.level}`;
        div.textContent = `line ${m.line}: ${m.message}`;
        markerPane.appendChild(div);
      }
    },
    onStatus(text) {
      statusBar.textContent = text;
    },
  });

  function showError(err: unknown): void {
    statusBar.textContent = err instanceof Error ? err.message : String(err);
    statusBar.classList.add("status-error");
    setTimeout(() => statusBar.classList.remove("status-error"), 3000);
  }

  runButton.addEventListener("click", () => {
    studio.runScript(editor.value).catch(showError);
  });

  consoleInput.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter" && consoleInput.value.trim()) {
      studio.runStatement(consoleInput.value.trim()).catch(showError);
      consoleInput.value = "";
    }
  });

  uploadInput.addEventListener("change", async () => {
    const file = uploadInput.files?.[0];
    if (!file) return;
    try {
      await studio.uploadModel(await file.text());
    } catch (err) {
      showError(err);
    }
  });

  meshToggle.addEventListener("change", () => {
    studio.detail = meshToggle.checked ? "meshes" : "attributes";
    studio.viewChanged().catch(showError);
  });

  studio.start().catch(showError);
  setInterval(() => {
    studio.pollOnce().catch(() => undefined);
  }, 1500);
}

boot();
