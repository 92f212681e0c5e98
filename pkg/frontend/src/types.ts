/** Payload shapes served by the /api/v1/ endpoints. */

export type Point = [number, number];

export interface SceneDict {
  template_id: string;
  seed: number;
  units: { length: string; angle: string };
  rooms: { id: string; outline: Point[] }[];
  walls: [Point, Point][];
  tables: {
    id: string;
    shape: string;
    center: Point;
    angle: number;
    perimeter: Point[];
    bound_radius: number;
  }[];
  seats: {
    id: string;
    table_id: string;
    position: Point;
    facing: number;
    perimeter_index: number;
    tableware: string;
  }[];
  features: {
    id: string;
    kind: string;
    geometry: Point[];
    orientation: number | null;
  }[];
  viewpoints: { id: string; position: Point }[];
}

export interface NpcCard {
  id: string;
  name: string;
  age: number;
  gender: string;
  job: string;
  dominant_hand: string;
  interests: string[];
}

export interface InstanceView {
  id: string;
  level: number;
  scene: SceneDict;
  party: string[];
  npcs: NpcCard[];
  utterances: Record<string, string[]>;
}

export interface InstanceSummary {
  id: string;
  level: number;
  template: string;
  party_size: number;
}

export interface SessionInfo {
  session_id: string;
  phase: string;
  instance_id: string;
  budgets: { queries: number; viewpoints: number; iterations: number };
}

export interface ReflectionEntry {
  ref: string;
  satisfied: boolean;
  weight: number;
  reason: string;
}

export interface ReflectionReport {
  instance_id: string;
  entries: ReflectionEntry[];
  unmet: ReflectionEntry[];
}

export interface CategoryScore {
  category: string;
  raw_fraction: number;
  remapped: number;
  weight: number;
}

export interface ScoreReport {
  instance_id: string;
  scaled_score: number;
  fully_satisfied: boolean;
  categories: string[];
  per_category: CategoryScore[];
  per_constraint: { ref: string; category: string; weight: number; grade: number }[];
}

export interface AnswerFile {
  schema_version: number;
  instance_id: string;
  assignment: Record<string, string>;
}

/** npc id -> seat id; always a partial injection on the client. */
export type Assignment = Record<string, string>;
