/** Pure HTML/SVG string rendering so the views are testable without a DOM.
 * The floor plan is drawn from the same geometry payload the server uses for
 * its SVG exports, so the two stay visually consistent. */

import type { BoardState } from "./board.js";
import { annotationsFor, violatedSeats } from "./board.js";
import type { Point, SceneDict } from "./types.js";

const SCALE = 55; // px per meter
const MARGIN = 30;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function bounds(scene: SceneDict): { minX: number; minY: number; maxY: number; w: number; h: number } {
  const xs = scene.rooms.flatMap((r) => r.outline.map((p) => p[0]));
  const ys = scene.rooms.flatMap((r) => r.outline.map((p) => p[1]));
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  return { minX, minY, maxY, w: maxX - minX, h: maxY - minY };
}

export function renderPlanSvg(board: BoardState): string {
  const scene = board.view.scene;
  const b = bounds(scene);
  // flip y so the plan reads with +y up, as in the exported SVGs
  const px = (p: Point) => MARGIN + (p[0] - b.minX) * SCALE;
  const py = (p: Point) => MARGIN + (b.maxY - p[1]) * SCALE;
  const width = b.w * SCALE + 2 * MARGIN;
  const height = b.h * SCALE + 2 * MARGIN;
  const bad = violatedSeats(board);
  const seatToNpc = new Map(
    Object.entries(board.assignment).map(([npc, seat]) => [seat, npc]),
  );
  const names = new Map(board.view.npcs.map((n) => [n.id, n.name]));

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}">`,
  );
  for (const room of scene.rooms) {
    const pts = room.outline.map((p) => `${px(p)},${py(p)}`).join(" ");
    parts.push(`<polygon points="${pts}" fill="#f7f4ee" stroke="#555"/>`);
  }
  for (const [a, c] of scene.walls) {
    parts.push(
      `<line x1="${px(a)}" y1="${py(a)}" x2="${px(c)}" y2="${py(c)}" ` +
        `stroke="#333" stroke-width="3"/>`,
    );
  }
  for (const feature of scene.features) {
    const pts = feature.geometry;
    if (pts.length >= 2) {
      const d = pts.map((p) => `${px(p)},${py(p)}`).join(" ");
      parts.push(`<polyline points="${d}" fill="none" stroke="#4a7dbd" stroke-width="4"/>`);
    }
    const ref = pts[0];
    parts.push(
      `<text x="${px(ref)}" y="${py(ref) - 6}" font-size="10" fill="#4a7dbd">` +
        `${esc(feature.kind)}</text>`,
    );
  }
  for (const table of scene.tables) {
    const pts = table.perimeter.map((p) => `${px(p)},${py(p)}`).join(" ");
    parts.push(`<polygon points="${pts}" fill="#e0d6c2" stroke="#8a7d63"/>`);
  }
  for (const seat of scene.seats) {
    const cx = px(seat.position);
    const cy = py(seat.position);
    const occupied = seatToNpc.get(seat.id);
    const stroke = bad.has(seat.id) ? "#d4373e" : "#444";
    const fill = occupied ? "#cfe3cf" : "#ffffff";
    parts.push(
      `<circle data-seat="${esc(seat.id)}" cx="${cx}" cy="${cy}" r="12" ` +
        `fill="${fill}" stroke="${stroke}" stroke-width="${bad.has(seat.id) ? 3 : 1.5}"/>`,
    );
    const label = occupied ? names.get(occupied) ?? occupied : seat.id;
    parts.push(
      `<text x="${cx}" y="${cy + 24}" font-size="10" text-anchor="middle">` +
        `${esc(label)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

export function renderCards(board: BoardState): string {
  const parts: string[] = [];
  for (const npc of board.view.npcs) {
    const seat = board.assignment[npc.id];
    const annotations = annotationsFor(board, npc.id);
    const unmet = annotations.filter((a) => !a.satisfied);
    const classes = ["card"];
    if (seat === undefined) classes.push("in-tray");
    if (unmet.length > 0) classes.push("flagged");
    parts.push(`<div class="${classes.join(" ")}" data-npc="${esc(npc.id)}">`);
    parts.push(
      `<h3>${esc(npc.name)}</h3>` +
        `<p class="meta">${npc.age}, ${esc(npc.job)} — ` +
        `${seat === undefined ? "unseated" : `seat ${esc(seat)}`}</p>`,
    );
    parts.push("<ul class=\"utterances\">");
    for (const text of board.view.utterances[npc.id] ?? []) {
      parts.push(`<li>${esc(text)}</li>`);
    }
    parts.push("</ul>");
    if (board.reflection) {
      parts.push("<ul class=\"annotations\">");
      for (const entry of annotations) {
        const cls = entry.satisfied ? "met" : "unmet";
        parts.push(
          `<li class="${cls}" data-ref="${esc(entry.ref)}">${esc(entry.reason)}</li>`,
        );
      }
      parts.push("</ul>");
    }
    parts.push("</div>");
  }
  return parts.join("");
}

export function renderScore(board: BoardState): string {
  if (!board.report) return "";
  const r = board.report;
  const rows = r.per_category
    .map(
      (c) =>
        `<tr><td>${esc(c.category)}</td><td>${c.raw_fraction.toFixed(4)}</td></tr>`,
    )
    .join("");
  return (
    `<div class="score"><strong>${r.scaled_score.toFixed(2)}</strong> / 99.30` +
    `<table>${rows}</table></div>`
  );
}

export function formatElapsed(ms: number): string {
  const totalSeconds = Math.floor(ms / 1000);
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${minutes}:${String(seconds).padStart(2, "0")}`;
}
