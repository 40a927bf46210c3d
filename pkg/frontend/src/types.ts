// Wire types mirroring the server's payload schemas.

export interface PositionOut {
  item_id: string;
  x: number;
  y: number;
}

export interface SolveInfo {
  converged: boolean;
  iterations: number;
  final_objective: number;
}

export interface LayoutPayload {
  revision: number;
  positions: PositionOut[];
  weights: number[];
  solve: SolveInfo;
  warning?: string | null;
}

export interface SessionCreated {
  session_id: string;
  payload: LayoutPayload;
}

export interface RevisionEvent {
  revision: number;
  payload: LayoutPayload;
}

export interface DatasetInfo {
  name: string;
  n_items: number;
  n_features: number;
  abstraction_level: string;
}

export interface Point {
  x: number;
  y: number;
}

export const WEIGHT_FLOOR = 1e-6;
