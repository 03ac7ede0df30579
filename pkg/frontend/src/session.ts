/**
 * Studio session state: ten lineup slots, a seed, the latest service
 * responses, and an append-only replay log.
 *
 * Rules the UI depends on:
 *  - a player can occupy at most one of the ten slots; duplicate picks
 *    are rejected before any request leaves the browser;
 *  - every displayed number comes verbatim from a service body (no
 *    client-side math beyond formatting);
 *  - predictions are keyed by the canonical (sorted) lineups, so
 *    reordering slots never issues a new request and never changes the
 *    chart;
 *  - the session seed travels in every simulate/optimize request, and
 *    the replay log reproduces every displayed value offline.
 */

import { ApiClient, RequestCancelled } from "./api.js";
import { buildChartModel, ChartModel } from "./chart.js";
import type {
  OptimizeResponse,
  PredictResponse,
  SeriesResponse,
} from "./types.js";

export type Side = "offense" | "defense";

export interface ReplayEntry {
  panel: "predict" | "series" | "optimize";
  request: unknown;
  response: unknown;
}

export interface SessionEvents {
  onPrediction?: (chart: ChartModel, body: PredictResponse) => void;
  onSeries?: (body: SeriesResponse) => void;
  onOptimize?: (body: OptimizeResponse) => void;
  onError?: (panel: string, message: string) => void;
  onSlotsChanged?: () => void;
}

const SLOTS = 5;

export class StudioSession {
  offense: (number | null)[] = new Array(SLOTS).fill(null);
  defense: (number | null)[] = new Array(SLOTS).fill(null);
  seed = 0;
  sims = 1000;
  possessions = 100;

  lastPrediction: PredictResponse | null = null;
  lastChart: ChartModel | null = null;
  lastSeries: SeriesResponse | null = null;
  lastOptimize: OptimizeResponse | null = null;
  candidatePool: number[] = [];

  private log: ReplayEntry[] = [];
  private lastPredictionKey: string | null = null;
  predictRequestCount = 0;
  /** Most recent fire-and-forget operation; awaitable by tests/UI. */
  lastOperation: Promise<void> = Promise.resolve();

  constructor(
    private api: ApiClient,
    private events: SessionEvents = {},
  ) {}

  // -- slot management ------------------------------------------------

  private slots(side: Side): (number | null)[] {
    return side === "offense" ? this.offense : this.defense;
  }

  placedIds(): Set<number> {
    const ids = new Set<number>();
    for (const value of [...this.offense, ...this.defense]) {
      if (value !== null) ids.add(value);
    }
    return ids;
  }

  /** Returns false (and touches nothing) when the player already
   * occupies any slot: duplicates are blocked before any request. */
  setSlot(side: Side, index: number, player: number | null): boolean {
    const slots = this.slots(side);
    if (player !== null && this.placedIds().has(player) && slots[index] !== player) {
      this.events.onError?.("picker", `player ${player} is already on court`);
      return false;
    }
    slots[index] = player;
    this.events.onSlotsChanged?.();
    this.lastOperation = this.refreshPrediction();
    return true;
  }

  swapSlots(side: Side, a: number, b: number): void {
    const slots = this.slots(side);
    [slots[a], slots[b]] = [slots[b], slots[a]];
    this.events.onSlotsChanged?.();
    this.lastOperation = this.refreshPrediction();
  }

  complete(): boolean {
    return !this.offense.includes(null) && !this.defense.includes(null);
  }

  private canonicalKey(): string {
    const off = [...(this.offense as number[])].sort((x, y) => x - y);
    const def = [...(this.defense as number[])].sort((x, y) => x - y);
    return JSON.stringify([off, def]);
  }

  // -- prediction -----------------------------------------------------

  /** Issue a predict request when the selection is complete and its
   * canonical form actually changed. */
  async refreshPrediction(): Promise<void> {
    if (!this.complete()) return;
    const key = this.canonicalKey();
    if (key === this.lastPredictionKey) return;
    this.lastPredictionKey = key;
    const request = {
      offense: this.offense as number[],
      defense: this.defense as number[],
    };
    this.predictRequestCount += 1;
    try {
      const body = await this.api.predict(request);
      this.lastPrediction = body;
      this.lastChart = buildChartModel(body.probabilities, body.classes);
      this.log.push({ panel: "predict", request, response: body });
      this.events.onPrediction?.(this.lastChart, body);
    } catch (err) {
      if (err instanceof RequestCancelled) return;
      this.lastPredictionKey = null; // allow a retry
      this.events.onError?.("predict", String((err as Error).message));
    }
  }

  // -- series simulation ----------------------------------------------

  async runSeries(): Promise<void> {
    if (!this.complete()) {
      this.events.onError?.("series", "pick all ten players first");
      return;
    }
    const request = {
      lineup_a: this.offense as number[],
      lineup_b: this.defense as number[],
      sims: this.sims,
      possessions: this.possessions,
      seed: this.seed,
    };
    try {
      const body = await this.api.simulateSeries(request);
      this.lastSeries = body;
      this.log.push({ panel: "series", request, response: body });
      this.events.onSeries?.(body);
    } catch (err) {
      if (err instanceof RequestCancelled) return;
      this.events.onError?.("series", String((err as Error).message));
    }
  }

  // -- 5th-man optimizer ----------------------------------------------

  /** Offense slots 0-3 are the fixed four; the defense is the opponent. */
  async runOptimizer(): Promise<void> {
    const fixed = this.offense.slice(0, 4);
    if (fixed.includes(null) || this.defense.includes(null)) {
      this.events.onError?.("optimize", "fix four offense players and a full opponent first");
      return;
    }
    const placed = new Set([...(fixed as number[]), ...(this.defense as number[])]);
    const candidates = this.candidatePool.filter((id) => !placed.has(id));
    if (candidates.length === 0) {
      this.events.onError?.("optimize", "candidate pool is empty");
      return;
    }
    const request = {
      fixed_four: fixed as number[],
      opponent: this.defense as number[],
      candidates,
      sims: this.sims,
      possessions: this.possessions,
      seed: this.seed,
    };
    try {
      const body = await this.api.optimizeFifth(request);
      this.lastOptimize = body;
      this.log.push({ panel: "optimize", request, response: body });
      this.events.onOptimize?.(body);
    } catch (err) {
      if (err instanceof RequestCancelled) return;
      this.events.onError?.("optimize", String((err as Error).message));
    }
  }

  /** The feedback loop: a ranked candidate fills the fifth offense slot
   * and re-predicts (exactly one request, since the canonical lineup
   * changed). */
  async applyCandidate(player: number): Promise<boolean> {
    if (this.placedIds().has(player) && this.offense[4] !== player) {
      this.events.onError?.("optimize", `player ${player} is already on court`);
      return false;
    }
    this.offense[4] = player;
    this.events.onSlotsChanged?.();
    await this.refreshPrediction();
    return true;
  }

  // -- replay ----------------------------------------------------------

  exportReplay(): string {
    return JSON.stringify({ seed: this.seed, entries: this.log }, null, 2);
  }

  /** Restore every displayed value from a replay file, no network. */
  loadReplay(text: string): void {
    const parsed = JSON.parse(text) as { seed: number; entries: ReplayEntry[] };
    this.seed = parsed.seed;
    this.log = parsed.entries;
    for (const entry of parsed.entries) {
      if (entry.panel === "predict") {
        const body = entry.response as PredictResponse;
        this.lastPrediction = body;
        this.lastChart = buildChartModel(body.probabilities, body.classes);
        this.events.onPrediction?.(this.lastChart, body);
      } else if (entry.panel === "series") {
        this.lastSeries = entry.response as SeriesResponse;
        this.events.onSeries?.(this.lastSeries);
      } else {
        this.lastOptimize = entry.response as OptimizeResponse;
        this.events.onOptimize?.(this.lastOptimize);
      }
    }
  }
}
