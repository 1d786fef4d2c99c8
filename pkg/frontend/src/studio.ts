/**
 * Studio control logic, kept free of DOM and WebGL so it is testable:
 * whole-script runs, the statement console, incremental message polling,
 * and generation-keyed scene refreshes. Rendering and widgets plug in via
 * the ViewerPort / StudioEvents interfaces.
 */

import { GatewayApi, LogEntry, RunOutcome } from "./api.js";
import { markersFromMessages, LineMarker } from "./markers.js";
import { OutputLog, OutputRow } from "./output.js";
import { parseSnapshot, Snapshot } from "./snapshot.js";

export interface ViewerPort {
  showScene(snapshot: Snapshot): void;
  viewDirection(): [number, number, number];
}

export interface StudioEvents {
  onOutput(added: OutputRow[]): void;
  onMarkers(markers: LineMarker[]): void;
  onStatus(text: string): void;
}

export type RenderDetail = "attributes" | "meshes";

export class StudioCore {
  readonly log = new OutputLog();
  markers: LineMarker[] = [];
  /** last rendered scene generation; 0 means nothing rendered yet */
  lastGeneration = 0;
  detail: RenderDetail = "attributes";
  hasModel = false;
  private cursor = 0;
  private busy = false;

  constructor(
    private api: GatewayApi,
    private viewer: ViewerPort,
    private events: StudioEvents,
  ) {}

  async start(): Promise<void> {
    await this.api.createSession();
    this.events.onStatus("session ready - upload a model (.zfz) to begin");
  }

  async uploadModel(text: string): Promise<void> {
    const summary = await this.api.uploadModel(text);
    this.hasModel = true;
    this.events.onStatus(
      `uploaded ${summary.name}: ${summary.fibers} fibers, bundles ${summary.bundles.join(", ")} - ` +
      `address it as LOAD "${summary.load_path}"`,
    );
  }

  /** Full run of the editor script (the Run button). */
  async runScript(script: string): Promise<RunOutcome> {
    return this.execute(script, "full");
  }

  /** One statement from the console; refreshes the scene only if it changed. */
  async runStatement(line: string): Promise<RunOutcome> {
    return this.execute(line, "single");
  }

  private async execute(script: string, mode: "full" | "single"): Promise<RunOutcome> {
    if (this.busy) throw new Error("a run is already in flight");
    this.busy = true;
    try {
      const outcome = await this.api.run(script, mode);
      this.absorbMessages(outcome.messages);
      this.markers = markersFromMessages(outcome.messages);
      this.events.onMarkers(this.markers);
      if (outcome.halted_at !== null) {
        this.events.onStatus(`halted at line ${outcome.halted_at}`);
      } else {
        this.events.onStatus(`${outcome.statements_run} statements run`);
      }
      if (outcome.generation > this.lastGeneration) {
        await this.refreshScene();
      }
      return outcome;
    } finally {
      this.busy = false;
    }
  }

  /** One poll cycle: pull new log entries; refetch when generation advanced. */
  async pollOnce(): Promise<void> {
    if (this.busy) return;
    const entries = await this.api.messages(this.cursor);
    this.absorbMessages(entries);
    const newest = entries.reduce((g, e) => Math.max(g, e.generation), this.lastGeneration);
    if (newest > this.lastGeneration) {
      await this.refreshScene();
    }
  }

  /** Camera moved: depth cues are view dependent, so refetch with the new view. */
  async viewChanged(): Promise<void> {
    if (this.lastGeneration > 0) {
      await this.refreshScene();
    }
  }

  async refreshScene(): Promise<void> {
    const text = await this.api.scene(this.viewer.viewDirection(), this.detail);
    const snapshot = parseSnapshot(text);
    this.viewer.showScene(snapshot);
    this.lastGeneration = snapshot.generation;
  }

  private absorbMessages(entries: LogEntry[]): void {
    const added = this.log.append(entries);
    for (const entry of entries) {
      if (entry.seq > this.cursor) this.cursor = entry.seq;
    }
    if (added.length > 0) {
      this.events.onOutput(added);
    }
  }
}
