// Pure rendering model: a frame payload becomes a grid of colored cells
// plus overlay text. DOM drawing consumes this; tests exercise it directly.

import { FramePayload, GameStatus } from "./protocol.js";

export interface Cell {
  x: number;
  y: number;
  /** topmost sprite name, "" when empty */
  sprite: string;
  color: string;
}

export interface BoardModel {
  width: number;
  height: number;
  cells: Cell[];
  score: number;
  status: GameStatus;
  frame: number;
}

const EMPTY_COLOR = "#111111";

/** Stable sprite-name -> color: every judge sees the same palette. */
export function spriteColor(name: string): string {
  if (!name) return EMPTY_COLOR;
  let hash = 2166136261;
  for (let i = 0; i < name.length; i++) {
    hash = (hash ^ name.charCodeAt(i)) * 16777619;
    hash >>>= 0;
  }
  const hue = hash % 360;
  const light = 45 + (Math.floor(hash / 360) % 30);
  return `hsl(${hue}, 70%, ${light}%)`;
}

export function malformed(payload: unknown): string | null {
  const p = payload as Partial<FramePayload> | null;
  if (!p || typeof p !== "object") return "payload is not an object";
  if (!Array.isArray(p.grid)) return "payload has no grid";
  if (typeof p.frame !== "number" || typeof p.score !== "number") {
    return "payload missing frame/score";
  }
  const width = p.grid.length ? p.grid[0].length : 0;
  for (const row of p.grid) {
    if (!Array.isArray(row) || row.length !== width) return "ragged grid";
  }
  return null;
}

/** Build the board model; throws with a judge-readable message when the
 * payload doesn't conform. */
export function renderFrame(payload: FramePayload): BoardModel {
  const problem = malformed(payload);
  if (problem !== null) throw new Error(`bad frame payload: ${problem}`);
  const cells: Cell[] = [];
  payload.grid.forEach((row, y) => {
    row.forEach((names, x) => {
      const sprite = names === "" ? "" : names.split(",")[0];
      cells.push({ x, y, sprite, color: spriteColor(sprite) });
    });
  });
  return {
    width: payload.grid.length ? payload.grid[0].length : 0,
    height: payload.grid.length,
    cells,
    score: payload.score,
    status: payload.status,
    frame: payload.frame,
  };
}
