// Client-side session state machine: which game is focused, lockstep
// action gating, and the vote rules mirrored from the server.

import { FramePayload, SessionView, VoteChoice } from "./protocol.js";

export const KEY_ACTIONS: Record<string, string> = {
  ArrowUp: "UP",
  ArrowDown: "DOWN",
  ArrowLeft: "LEFT",
  ArrowRight: "RIGHT",
  " ": "USE",
};

export interface ActionMessage {
  gameIndex: 0 | 1;
  action: string;
}

export class ClientSession {
  readonly sessionId: string;
  readonly legalActions: string[];
  current: 0 | 1 = 0;
  plays: [number, number] = [0, 0];
  latest: (FramePayload | null)[] = [null, null];
  voted = false;
  private awaitingFrame = false;

  constructor(view: SessionView) {
    this.sessionId = view.sessionId;
    this.legalActions = view.actions;
    this.plays = view.plays;
    this.voted = view.voted;
  }

  switchTo(index: 0 | 1): void {
    this.current = index;
  }

  /** Map a key press to at most one lockstep action message. Returns null
   * while a frame is still outstanding, for unmapped or illegal keys, and
   * after the vote locked the session. */
  keyToMessage(key: string): ActionMessage | null {
    if (this.voted || this.awaitingFrame) return null;
    const action = key === "Tab" ? null : KEY_ACTIONS[key] ?? "NIL";
    if (action === null || !this.legalActions.includes(action)) return null;
    this.awaitingFrame = true;
    return { gameIndex: this.current, action };
  }

  onFrame(payload: FramePayload): void {
    this.awaitingFrame = false;
    if (this.latest[this.current] === null || payload.frame === 0) {
      this.plays[this.current] += 1;
    }
    this.latest[this.current] = payload;
  }

  onError(): void {
    this.awaitingFrame = false;
  }

  bothPlayed(): boolean {
    return this.plays[0] > 0 && this.plays[1] > 0;
  }

  /** Null when the vote may be posted, else the reason it may not. */
  voteBlocked(_choice: VoteChoice): string | null {
    if (this.voted) return "this session already voted";
    if (!this.bothPlayed()) return "play both games before voting";
    return null;
  }

  onVoteAccepted(): void {
    this.voted = true;
  }
}
