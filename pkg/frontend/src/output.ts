/**
 * Output pane model: service log entries in arrival order, with result rows
 * flagged for the highlighted (disparate-background) treatment and the three
 * diagnostic levels mapped to distinct styles.
 */

import { LogEntry } from "./api.js";

export interface OutputRow {
  seq: number;
  level: LogEntry["level"];
  text: string;
  line: number;
  /** result rows get the highlighted background */
  highlight: boolean;
}

export function toRow(entry: LogEntry): OutputRow {
  return {
    seq: entry.seq,
    level: entry.level,
    text: entry.line > 0 ? `${entry.text} (line ${entry.line})` : entry.text,
    line: entry.line,
    highlight: entry.level === "result",
  };
}

/** CSS class per level; the styles are defined in styles.css. */
export function levelClass(level: LogEntry["level"]): string {
  return `log-${level}`;
}

export class OutputLog {
  rows: OutputRow[] = [];
  private seen = new Set<number>();

  /** Append entries, preserving service order and dropping duplicates. */
  append(entries: LogEntry[]): OutputRow[] {
    const added: OutputRow[] = [];
    for (const entry of entries) {
      if (this.seen.has(entry.seq)) continue;
      this.seen.add(entry.seq);
      const row = toRow(entry);
      this.rows.push(row);
      added.push(row);
    }
    return added;
  }

  clear(): void {
    this.rows = [];
    this.seen.clear();
  }
}
