/**
 * Per-line diagnostic markers for the editor, derived only from the entries
 * the service reported for the last run (never computed client-side).
 */

import { LogEntry } from "./api.js";

export interface LineMarker {
  line: number;
  level: "fatal" | "warning" | "notice";
  message: string;
}

export function markersFromMessages(entries: LogEntry[]): LineMarker[] {
  const markers: LineMarker[] = [];
  for (const entry of entries) {
    if (entry.level === "result" || entry.line <= 0) continue;
    markers.push({ line: entry.line, level: entry.level, message: entry.text });
  }
  return markers;
}
