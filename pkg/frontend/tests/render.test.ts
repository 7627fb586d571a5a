import { describe, expect, it } from "vitest";

import { FramePayload } from "../src/protocol.js";
import { malformed, renderFrame, spriteColor } from "../src/render.js";

function frame(grid: string[][], overrides: Partial<FramePayload> = {}): FramePayload {
  return { frame: 0, score: 0, status: "Running", grid, ...overrides };
}

describe("spriteColor", () => {
  it("is stable per name", () => {
    expect(spriteColor("avatar")).toBe(spriteColor("avatar"));
  });

  it("distinguishes typical sprite names", () => {
    const names = ["avatar", "wall", "alien", "bomb", "sam", "portal", "gem"];
    const colors = new Set(names.map(spriteColor));
    expect(colors.size).toBe(names.length);
  });

  it("maps the empty cell to the background color", () => {
    expect(spriteColor("")).toBe("#111111");
  });
});

describe("renderFrame", () => {
  it("renders an empty grid as a blank board with score 0", () => {
    const model = renderFrame(frame([["", ""], ["", ""]]));
    expect(model.width).toBe(2);
    expect(model.height).toBe(2);
    expect(model.cells).toHaveLength(4);
    expect(model.cells.every((c) => c.sprite === "")).toBe(true);
    expect(model.score).toBe(0);
  });

  it("uses the topmost sprite of a stacked cell", () => {
    const model = renderFrame(frame([["avatar,floor"]]));
    expect(model.cells[0].sprite).toBe("avatar");
    expect(model.cells[0].color).toBe(spriteColor("avatar"));
  });

  it("carries the win status through for the banner", () => {
    const model = renderFrame(frame([[""]], { status: "Win", score: 9 }));
    expect(model.status).toBe("Win");
    expect(model.score).toBe(9);
  });

  it("rejects malformed payloads with a readable error", () => {
    expect(() => renderFrame({} as FramePayload)).toThrow(/bad frame payload/);
    expect(malformed(null)).toBeTruthy();
    expect(malformed({ frame: 1, score: 0, grid: [["a"], ["b", "c"]] }))
      .toBe("ragged grid");
    expect(malformed(frame([["", ""]]))).toBeNull();
  });

  it("is identical for identical payload sequences", () => {
    const payload = frame([["avatar", "wall"], ["", "gem"]], { score: 3 });
    expect(renderFrame(payload)).toEqual(renderFrame(structuredClone(payload)));
  });
});
