/** Wire types for the courtvec read-only inference service (api/v1). */

export interface OutcomeClass {
  index: number;
  label: string;
  points: number;
}

export interface PredictResponse {
  offense: number[];
  defense: number[];
  probabilities: number[];
  classes: OutcomeClass[];
}

export interface SeriesResponse {
  seed: number;
  sims: number;
  possessions: number;
  team_a_series_win_fraction: number;
  mean_series_score: [number, number];
  mean_margin: number;
  margin_std: number;
  game_win_fraction_a: number;
  mean_games: number;
  series_lengths: Record<string, number>;
  margin_basis: string;
}

export interface CandidateRow {
  candidate: number;
  name: string;
  win_pct: number;
  mean_margin: number;
  margin_std: number;
  series_win_fraction: number;
  mean_series_score: [number, number];
}

export interface OptimizeResponse {
  seed: number;
  rows: CandidateRow[];
}

export interface PlayerInfo {
  player_id: number;
  name: string;
  position: string;
  minutes: number;
  fg_made: number;
  threes_made: number;
  assists: number;
  rebounds: number;
  plus_minus: number;
}

export interface PlayersResponse {
  count: number;
  players: PlayerInfo[];
}

export interface ServiceError {
  code: string;
  message: string;
  detail?: unknown;
}

export interface PredictRequest {
  offense: number[];
  defense: number[];
}

export interface SeriesRequest {
  lineup_a: number[];
  lineup_b: number[];
  sims: number;
  possessions: number;
  seed: number;
}

export interface OptimizeRequest {
  fixed_four: number[];
  opponent: number[];
  candidates: number[];
  sims: number;
  possessions: number;
  seed: number;
}
