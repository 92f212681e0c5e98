/** Board state and the four user-facing operations.
 *
 * Invariants:
 *  - the partial assignment never maps two NPCs to the same seat;
 *  - undo restores the exact prior board (assignment, tray, annotations);
 *  - every display value is derived from server responses — the client
 *    computes no grades, no reflections, and no scores.
 */

import type { ApiClient } from "./api.js";
import type {
  Assignment,
  InstanceView,
  ReflectionReport,
  ScoreReport,
} from "./types.js";

export interface Snapshot {
  assignment: Assignment;
  tray: string[];
  reflection: ReflectionReport | null;
}

export interface BoardState {
  view: InstanceView;
  sessionId: string | null;
  assignment: Assignment;
  /** NPCs not yet seated, in display order. */
  tray: string[];
  reflection: ReflectionReport | null;
  undoStack: Snapshot[];
  startedAt: number;
  finalizedAt: number | null;
  report: ScoreReport | null;
  locked: boolean;
}

/** Minimal persistence surface; localStorage satisfies it in the browser. */
export interface DraftStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface BoardOptions {
  now?: () => number;
  draftStore?: DraftStore | null;
}

const draftKey = (instanceId: string) => `seatbench-draft:${instanceId}`;

function snapshot(board: BoardState): Snapshot {
  return {
    assignment: { ...board.assignment },
    tray: [...board.tray],
    reflection: board.reflection
      ? (JSON.parse(JSON.stringify(board.reflection)) as ReflectionReport)
      : null,
  };
}

function saveDraft(board: BoardState, store: DraftStore | null | undefined): void {
  if (!store) return;
  store.setItem(
    draftKey(board.view.id),
    JSON.stringify({ assignment: board.assignment, tray: board.tray }),
  );
}

function validDraft(view: InstanceView, draft: unknown): draft is Snapshot {
  if (typeof draft !== "object" || draft === null) return false;
  const d = draft as { assignment?: unknown; tray?: unknown };
  if (typeof d.assignment !== "object" || d.assignment === null) return false;
  if (!Array.isArray(d.tray)) return false;
  const assignment = d.assignment as Record<string, unknown>;
  const seats = new Set(view.scene.seats.map((s) => s.id));
  const party = new Set(view.party);
  const used = new Set<string>();
  for (const [npc, seat] of Object.entries(assignment)) {
    if (!party.has(npc) || typeof seat !== "string" || !seats.has(seat)) return false;
    if (used.has(seat)) return false;
    used.add(seat);
  }
  const all = [...Object.keys(assignment), ...(d.tray as string[])].sort();
  return JSON.stringify(all) === JSON.stringify([...view.party].sort());
}

/** Fetch the instance view and build a fresh board. A valid local draft for
 * the same instance is restored; anything malformed is discarded. */
export async function loadBoard(
  api: ApiClient,
  instanceId: string,
  opts: BoardOptions = {},
): Promise<BoardState> {
  const view = await api.getInstance(instanceId);
  const board: BoardState = {
    view,
    sessionId: null,
    assignment: {},
    tray: [...view.party],
    reflection: null,
    undoStack: [],
    startedAt: (opts.now ?? Date.now)(),
    finalizedAt: null,
    report: null,
    locked: false,
  };
  const store = opts.draftStore;
  if (store) {
    const raw = store.getItem(draftKey(instanceId));
    if (raw !== null) {
      try {
        const draft: unknown = JSON.parse(raw);
        if (validDraft(view, draft)) {
          board.assignment = { ...(draft as Snapshot).assignment };
          board.tray = [...(draft as Snapshot).tray];
        } else {
          store.removeItem(draftKey(instanceId));
        }
      } catch {
        store.removeItem(draftKey(instanceId));
      }
    }
  }
  return board;
}

/** Seat an NPC. A displaced occupant returns to the tray (never to another
 * seat); the prior state is pushed onto the undo stack. */
export function assignNpc(
  board: BoardState,
  npcId: string,
  seatId: string,
  opts: BoardOptions = {},
): BoardState {
  if (board.locked) throw new Error("board is finalized");
  if (!board.view.party.includes(npcId)) throw new Error(`unknown NPC ${npcId}`);
  if (!board.view.scene.seats.some((s) => s.id === seatId)) {
    throw new Error(`unknown seat ${seatId}`);
  }
  if (board.assignment[npcId] === seatId) return board;

  board.undoStack.push(snapshot(board));
  const occupant = Object.keys(board.assignment).find(
    (npc) => board.assignment[npc] === seatId,
  );
  if (occupant !== undefined) {
    delete board.assignment[occupant];
    board.tray.push(occupant);
  }
  board.tray = board.tray.filter((npc) => npc !== npcId);
  board.assignment[npcId] = seatId;
  saveDraft(board, opts.draftStore);
  return board;
}

/** Return a seated NPC to the tray. */
export function unassignNpc(
  board: BoardState,
  npcId: string,
  opts: BoardOptions = {},
): BoardState {
  if (board.locked) throw new Error("board is finalized");
  if (!(npcId in board.assignment)) return board;
  board.undoStack.push(snapshot(board));
  delete board.assignment[npcId];
  board.tray.push(npcId);
  saveDraft(board, opts.draftStore);
  return board;
}

/** Restore the exact prior assignment, tray, and annotations. */
export function undo(board: BoardState, opts: BoardOptions = {}): BoardState {
  if (board.locked) throw new Error("board is finalized");
  const prior = board.undoStack.pop();
  if (!prior) return board;
  board.assignment = prior.assignment;
  board.tray = prior.tray;
  board.reflection = prior.reflection;
  saveDraft(board, opts.draftStore);
  return board;
}

export function isComplete(board: BoardState): boolean {
  return board.tray.length === 0 &&
    Object.keys(board.assignment).length === board.view.party.length;
}

async function ensureSession(api: ApiClient, board: BoardState): Promise<string> {
  if (board.sessionId === null) {
    const info = await api.openSession(board.view.id);
    board.sessionId = info.session_id;
  }
  return board.sessionId;
}

/** Submit the complete assignment for reflection. The server returns only
 * constraint annotations; no score is shown until finalize. */
export async function submitForReflection(
  api: ApiClient,
  board: BoardState,
): Promise<BoardState> {
  if (board.locked) throw new Error("board is finalized");
  if (!isComplete(board)) throw new Error("seat every guest before submitting");
  const sessionId = await ensureSession(api, board);
  board.reflection = await api.propose(sessionId, board.assignment);
  return board;
}

export interface FinalizeResult {
  board: BoardState;
  report: ScoreReport;
  /** Exact bytes of the exported answer file. */
  answerFileText: string;
  answerFileName: string;
}

/** Finalize: reveal the score, lock the board, stop the timer, and export
 * the server's answer file verbatim. */
export async function finalizeAndExport(
  api: ApiClient,
  board: BoardState,
  opts: BoardOptions = {},
): Promise<FinalizeResult> {
  if (board.locked) throw new Error("board already finalized");
  if (!isComplete(board)) throw new Error("seat every guest before finalizing");
  const sessionId = await ensureSession(api, board);
  const report = await api.finalize(sessionId, board.assignment);
  const answer = await api.exportAnswer(sessionId);
  board.report = report;
  board.locked = true;
  board.finalizedAt = (opts.now ?? Date.now)();
  opts.draftStore?.removeItem(draftKey(board.view.id));
  return {
    board,
    report,
    answerFileText: JSON.stringify(answer),
    answerFileName: `${board.view.id}-answer.json`,
  };
}

/** Elapsed play time in milliseconds; frozen once finalized. */
export function elapsedMs(board: BoardState, now: () => number = Date.now): number {
  return (board.finalizedAt ?? now()) - board.startedAt;
}

/** NPC ids a constraint ref names: "pref:<npc>:<kind>" or
 * "conflict:<a>:<b>:<kind>". */
export function refParties(ref: string): string[] {
  const parts = ref.split(":");
  return parts[0] === "conflict" ? parts.slice(1, 3) : parts.slice(1, 2);
}

/** Constraint annotations touching one NPC, from the last reflection. */
export function annotationsFor(board: BoardState, npcId: string) {
  if (!board.reflection) return [];
  return board.reflection.entries.filter((e) => refParties(e.ref).includes(npcId));
}

/** Seat ids holding an NPC with an unmet constraint, for highlighting. */
export function violatedSeats(board: BoardState): Set<string> {
  const out = new Set<string>();
  if (!board.reflection) return out;
  for (const entry of board.reflection.unmet) {
    for (const npc of refParties(entry.ref)) {
      const seat = board.assignment[npc];
      if (seat !== undefined) out.add(seat);
    }
  }
  return out;
}
