/** Browser wiring: instance picker, click-to-assign board, undo, submit for
 * reflection, and finalize with answer-file download. */

import { ApiClient } from "./api.js";
import {
  BoardState,
  assignNpc,
  elapsedMs,
  finalizeAndExport,
  isComplete,
  loadBoard,
  submitForReflection,
  unassignNpc,
  undo,
} from "./board.js";
import { formatElapsed, renderCards, renderPlanSvg, renderScore } from "./render.js";

const api = new ApiClient("");
const opts = { draftStore: window.localStorage };

let board: BoardState | null = null;
let selectedNpc: string | null = null;

const $ = (id: string) => document.getElementById(id)!;

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.className = isError ? "error" : "";
}

function redraw(): void {
  if (!board) return;
  $("plan").innerHTML = renderPlanSvg(board);
  $("cards").innerHTML = renderCards(board);
  $("score").innerHTML = renderScore(board);
  ($("submit") as HTMLButtonElement).disabled = !isComplete(board) || board.locked;
  ($("finalize") as HTMLButtonElement).disabled = !isComplete(board) || board.locked;
  ($("undo") as HTMLButtonElement).disabled =
    board.undoStack.length === 0 || board.locked;

  for (const el of $("cards").querySelectorAll<HTMLElement>("[data-npc]")) {
    const npc = el.dataset.npc!;
    el.classList.toggle("selected", npc === selectedNpc);
    el.onclick = () => {
      selectedNpc = npc === selectedNpc ? null : npc;
      redraw();
    };
    el.ondblclick = () => {
      if (board && !board.locked) {
        unassignNpc(board, npc, opts);
        redraw();
      }
    };
  }
  for (const el of $("plan").querySelectorAll<SVGElement>("[data-seat]")) {
    el.addEventListener("click", () => {
      if (board && selectedNpc && !board.locked) {
        assignNpc(board, selectedNpc, el.getAttribute("data-seat")!, opts);
        selectedNpc = null;
        redraw();
      }
    });
  }
}

function tick(): void {
  if (board) $("timer").textContent = formatElapsed(elapsedMs(board));
}

async function openInstance(instanceId: string): Promise<void> {
  try {
    board = await loadBoard(api, instanceId, opts);
    selectedNpc = null;
    setStatus(`loaded ${instanceId}; click a card, then a seat`);
    redraw();
  } catch (err) {
    setStatus(String(err), true); // board left untouched on failure
  }
}

async function init(): Promise<void> {
  const listing = await api.listInstances();
  const picker = $("picker") as HTMLSelectElement;
  for (const inst of listing.instances) {
    const option = document.createElement("option");
    option.value = inst.id;
    option.textContent = `${inst.id} (level ${inst.level}, ${inst.party_size} guests)`;
    picker.appendChild(option);
  }
  picker.onchange = () => void openInstance(picker.value);

  $("undo").onclick = () => {
    if (board) {
      undo(board, opts);
      redraw();
    }
  };
  $("submit").onclick = async () => {
    if (!board) return;
    try {
      await submitForReflection(api, board);
      setStatus(
        board.reflection!.unmet.length === 0
          ? "reflection: everything satisfied"
          : `reflection: ${board.reflection!.unmet.length} unmet`,
      );
      redraw();
    } catch (err) {
      setStatus(String(err), true);
    }
  };
  $("finalize").onclick = async () => {
    if (!board) return;
    try {
      const result = await finalizeAndExport(api, board, opts);
      setStatus(`final score ${result.report.scaled_score.toFixed(2)}`);
      const blob = new Blob([result.answerFileText], { type: "application/json" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = result.answerFileName;
      a.click();
      URL.revokeObjectURL(a.href);
      redraw();
    } catch (err) {
      setStatus(String(err), true);
    }
  };

  window.setInterval(tick, 1000);
  if (listing.instances.length > 0) {
    picker.value = listing.instances[0].id;
    await openInstance(picker.value);
  }
}

void init();
