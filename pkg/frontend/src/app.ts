// Browser wiring: DOM, WebSocket, keyboard. All decision logic lives in
// session.ts / render.ts so it stays testable without a browser.

import { isErrorPayload, SessionView, SocketPayload, VoteChoice } from "./protocol.js";
import { BoardModel, renderFrame } from "./render.js";
import { ClientSession } from "./session.js";

const CELL = 24;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function drawBoard(canvas: HTMLCanvasElement, model: BoardModel): void {
  canvas.width = model.width * CELL;
  canvas.height = model.height * CELL;
  const ctx = canvas.getContext("2d")!;
  for (const cell of model.cells) {
    ctx.fillStyle = cell.color;
    ctx.fillRect(cell.x * CELL, cell.y * CELL, CELL - 1, CELL - 1);
  }
}

function banner(text: string, isError = false): void {
  const node = el<HTMLDivElement>("banner");
  node.textContent = text;
  node.className = isError ? "banner error" : "banner";
}

async function main(): Promise<void> {
  const base = window.location.origin;
  const game = new URLSearchParams(window.location.search).get("game") ?? "aliens";

  const created = await fetch(`${base}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ game }),
  });
  if (!created.ok) {
    banner(`could not create session: ${await created.text()}`, true);
    return;
  }
  const { sessionId } = (await created.json()) as { sessionId: string };
  const view = (await (await fetch(`${base}/sessions/${sessionId}`)).json()) as SessionView;
  const session = new ClientSession(view);

  const canvas = el<HTMLCanvasElement>("board");
  const scoreNode = el<HTMLSpanElement>("score");
  const statusNode = el<HTMLSpanElement>("status");
  const whichNode = el<HTMLSpanElement>("which");

  const ws = new WebSocket(
    `${base.replace(/^http/, "ws")}/sessions/${sessionId}/ws`);

  function refresh(): void {
    whichNode.textContent = session.current === 0 ? "first game" : "second game";
    const latest = session.latest[session.current];
    if (!latest) {
      banner("press any arrow key to deal the board");
      return;
    }
    try {
      const model = renderFrame(latest);
      drawBoard(canvas, model);
      scoreNode.textContent = String(model.score);
      statusNode.textContent = model.status;
      if (model.status === "Win") banner("you won - restart or vote");
      else if (model.status === "Lose") banner("game over - restart or vote");
      else banner("");
    } catch (err) {
      banner(String(err), true);
    }
  }

  ws.onmessage = (event) => {
    const payload = JSON.parse(event.data) as SocketPayload;
    if (isErrorPayload(payload)) {
      session.onError();
      banner(payload.error, true);
      return;
    }
    session.onFrame(payload);
    refresh();
  };

  window.addEventListener("keydown", (event) => {
    if (event.key === "1" || event.key === "2") {
      session.switchTo(event.key === "1" ? 0 : 1);
      refresh();
      return;
    }
    const message = session.keyToMessage(event.key);
    if (message) {
      event.preventDefault();
      ws.send(JSON.stringify(message));
    }
  });

  el<HTMLButtonElement>("restart").addEventListener("click", async () => {
    const r = await fetch(
      `${base}/sessions/${sessionId}/restart/${session.current}`,
      { method: "POST" });
    if (r.ok) {
      session.onFrame(await r.json());
      refresh();
    } else banner(await r.text(), true);
  });

  for (const choice of ["First", "Second", "Both", "Neither"] as VoteChoice[]) {
    el<HTMLButtonElement>(`vote-${choice.toLowerCase()}`).addEventListener(
      "click", async () => {
        const blocked = session.voteBlocked(choice);
        if (blocked) {
          banner(blocked, true);
          return;
        }
        const comment = el<HTMLInputElement>("comment").value;
        const r = await fetch(`${base}/sessions/${sessionId}/vote`, {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify({ choice, comment }),
        });
        if (r.ok) {
          session.onVoteAccepted();
          banner("vote recorded - thanks for judging");
        } else {
          banner((await r.json()).error ?? "vote rejected", true);
        }
      });
  }

  refresh();
}

main().catch((err) => banner(String(err), true));
