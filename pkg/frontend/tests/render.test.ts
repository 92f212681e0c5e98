import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { assignNpc, loadBoard, submitForReflection } from "../src/board.js";
import { formatElapsed, renderCards, renderPlanSvg, renderScore } from "../src/render.js";
import assignmentConflict from "./fixtures/assignment_conflict.json";
import { makeMockServer } from "./mockServer.js";

async function freshBoard() {
  const server = makeMockServer();
  const api = new ApiClient("", server.fetch);
  const board = await loadBoard(api, server.instanceId);
  return { api, server, board };
}

describe("renderPlanSvg", () => {
  it("draws every seat slot and every table", async () => {
    const { board } = await freshBoard();
    const svg = renderPlanSvg(board);
    expect(svg.match(/data-seat=/g)).toHaveLength(board.view.scene.seats.length);
    expect(svg.match(/<polygon/g)!.length).toBeGreaterThanOrEqual(
      board.view.scene.rooms.length + board.view.scene.tables.length,
    );
  });

  it("labels occupied seats with the guest's name", async () => {
    const { board } = await freshBoard();
    const npc = board.view.npcs[0];
    assignNpc(board, npc.id, board.view.scene.seats[0].id);
    expect(renderPlanSvg(board)).toContain(npc.name);
  });

  it("highlights seats holding guests with unmet constraints", async () => {
    const { api, board } = await freshBoard();
    for (const [npc, seat] of Object.entries(
      assignmentConflict as Record<string, string>,
    )) {
      assignNpc(board, npc, seat);
    }
    await submitForReflection(api, board);
    expect(renderPlanSvg(board)).toContain('stroke="#d4373e"');
  });
});

describe("renderCards", () => {
  it("shows one card per guest with their utterances", async () => {
    const { board } = await freshBoard();
    const html = renderCards(board);
    expect(html.match(/data-npc=/g)).toHaveLength(board.view.party.length);
    for (const texts of Object.values(board.view.utterances)) {
      for (const text of texts) {
        // escaped text must still be present
        expect(html).toContain(text.replace(/&/g, "&amp;").slice(0, 30));
      }
    }
  });

  it("renders reflection reasons verbatim on flagged cards", async () => {
    const { api, board } = await freshBoard();
    for (const [npc, seat] of Object.entries(
      assignmentConflict as Record<string, string>,
    )) {
      assignNpc(board, npc, seat);
    }
    await submitForReflection(api, board);
    const html = renderCards(board);
    for (const entry of board.reflection!.unmet) {
      expect(html).toContain(entry.reason);
    }
    expect(html).toContain("flagged");
  });
});

describe("renderScore / formatElapsed", () => {
  it("shows nothing before finalize and two decimals after", async () => {
    const { board } = await freshBoard();
    expect(renderScore(board)).toBe("");
    board.report = {
      instance_id: board.view.id,
      scaled_score: 99.29999999999987,
      fully_satisfied: true,
      categories: ["embodied"],
      per_category: [
        { category: "embodied", raw_fraction: 1, remapped: 0.993, weight: 5 },
      ],
      per_constraint: [],
    };
    expect(renderScore(board)).toContain("99.30");
  });

  it("formats elapsed time mm:ss", () => {
    expect(formatElapsed(0)).toBe("0:00");
    expect(formatElapsed(61_000)).toBe("1:01");
    expect(formatElapsed(600_500)).toBe("10:00");
  });
});
