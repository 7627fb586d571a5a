// Shapes of the judging-service payloads this client consumes.

export type GameStatus = "Running" | "Win" | "Lose" | "NotStarted";

export interface FramePayload {
  frame: number;
  score: number;
  status: GameStatus;
  /** grid[y][x] is a comma-separated list of sprite names, "" for empty */
  grid: string[][];
}

export interface ErrorPayload {
  error: string;
}

export type SocketPayload = FramePayload | ErrorPayload;

export interface SessionView {
  sessionId: string;
  game: string;
  plays: [number, number];
  statuses: [GameStatus, GameStatus];
  actions: string[];
  voted: boolean;
}

export type VoteChoice = "First" | "Second" | "Both" | "Neither";

export function isErrorPayload(p: SocketPayload): p is ErrorPayload {
  return typeof (p as ErrorPayload).error === "string";
}
