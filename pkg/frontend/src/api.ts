/** Typed client for the session service HTTP API. */

export interface LogEntry {
  seq: number;
  generation: number;
  level: "fatal" | "warning" | "notice" | "result";
  text: string;
  line: number;
  column: number;
  name: string | null;
  value: number | null;
}

export interface RunOutcome {
  statements_run: number;
  halted_at: number | null;
  scene_dirty: boolean;
  generation: number;
  messages: LogEntry[];
}

export interface ModelSummary {
  name: string;
  load_path: string;
  fibers: number;
  bundles: string[];
  warnings: string[];
}

export interface VariableInfo {
  name: string;
  kind: "scalar" | "fiber_set" | "model_handle";
  value?: number;
  size?: number;
}

export type RunMode = "full" | "single";

export interface GatewayApi {
  createSession(): Promise<string>;
  uploadModel(text: string): Promise<ModelSummary>;
  run(script: string, mode: RunMode): Promise<RunOutcome>;
  scene(view: [number, number, number], detail: "attributes" | "meshes"): Promise<string>;
  messages(since: number): Promise<LogEntry[]>;
  variables(): Promise<VariableInfo[]>;
}

export class HttpApi implements GatewayApi {
  private sessionId: string | null = null;

  constructor(private base: string = "") {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  private async checked(response: Response): Promise<Response> {
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const body = await response.json();
        detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
      } catch {
        /* non-JSON error body */
      }
      throw new Error(`service error: ${detail}`);
    }
    return response;
  }

  private sid(): string {
    if (this.sessionId === null) throw new Error("no session established");
    return this.sessionId;
  }

  async createSession(): Promise<string> {
    const r = await this.checked(await fetch(this.url("/sessions"), { method: "POST" }));
    this.sessionId = (await r.json()).session_id;
    return this.sessionId!;
  }

  async uploadModel(text: string): Promise<ModelSummary> {
    const r = await this.checked(
      await fetch(this.url(`/sessions/${this.sid()}/model`), {
        method: "POST",
        headers: { "Content-Type": "text/plain" },
        body: text,
      }),
    );
    return r.json();
  }

  async run(script: string, mode: RunMode): Promise<RunOutcome> {
    const r = await this.checked(
      await fetch(this.url(`/sessions/${this.sid()}/run`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ script, mode }),
      }),
    );
    return r.json();
  }

  async scene(view: [number, number, number], detail: "attributes" | "meshes"): Promise<string> {
    const params = new URLSearchParams({ view: view.join(","), detail });
    const r = await this.checked(
      await fetch(this.url(`/sessions/${this.sid()}/scene?${params}`)),
    );
    return r.text();
  }

  async messages(since: number): Promise<LogEntry[]> {
    const r = await this.checked(
      await fetch(this.url(`/sessions/${this.sid()}/messages?since=${since}`)),
    );
    return (await r.json()).messages;
  }

  async variables(): Promise<VariableInfo[]> {
    const r = await this.checked(await fetch(this.url(`/sessions/${this.sid()}/variables`)));
    return (await r.json()).variables;
  }
}
