/**
 * DOM wiring for the lineup studio. All state lives in StudioSession;
 * this module only builds pickers/panels and forwards events.
 */

import { ApiClient } from "./api.js";
import { renderChartHtml } from "./chart.js";
import { StudioSession } from "./session.js";
import type { OptimizeResponse, PlayerInfo, SeriesResponse } from "./types.js";

const API_BASE =
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8000";

const el = (id: string) => document.getElementById(id)!;

function fmtPct(x: number): string {
  return `${(100 * x).toFixed(1)}%`;
}

function seriesHtml(body: SeriesResponse): string {
  const [winsA, winsB] = body.mean_series_score;
  return `
    <table class="kv">
      <tr><td>Mean series score</td><td>${winsA.toFixed(2)} vs ${winsB.toFixed(2)}</td></tr>
      <tr><td>Series win (offense side)</td><td>${fmtPct(body.team_a_series_win_fraction)}</td></tr>
      <tr><td>Game win (offense side)</td><td>${fmtPct(body.game_win_fraction_a)}</td></tr>
      <tr><td>Margin per game</td><td>${body.mean_margin.toFixed(2)} &plusmn; ${body.margin_std.toFixed(2)}</td></tr>
      <tr><td>Mean games per series</td><td>${body.mean_games.toFixed(2)}</td></tr>
      <tr><td>Sims / possessions / seed</td><td>${body.sims} / ${body.possessions} / ${body.seed}</td></tr>
    </table>`;
}

function optimizerHtml(body: OptimizeResponse): string {
  const rows = body.rows
    .map(
      (row) => `
      <tr class="candidate" data-candidate="${row.candidate}">
        <td><button class="pick-candidate" data-candidate="${row.candidate}">${row.name}</button></td>
        <td>${row.win_pct.toFixed(1)}%</td>
        <td>${row.mean_margin.toFixed(2)} &plusmn; ${row.margin_std.toFixed(1)}</td>
      </tr>`,
    )
    .join("");
  return `
    <table class="ranking">
      <thead><tr><th>Candidate</th><th>Win %</th><th>Avg. margin (&plusmn;1&sigma;)</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
}

async function boot(): Promise<void> {
  const api = new ApiClient(API_BASE, (url, init) => fetch(url, {
    ...init,
    headers: init.body ? { "content-type": "application/json" } : undefined,
  }));

  const session = new StudioSession(api, {
    onPrediction: (chart) => {
      el("chart").innerHTML = renderChartHtml(chart);
      el("chart-hint").textContent = "";
    },
    onSeries: (body) => {
      el("series-panel").innerHTML = seriesHtml(body);
    },
    onOptimize: (body) => {
      el("optimizer-panel").innerHTML = optimizerHtml(body);
      el("optimizer-panel")
        .querySelectorAll<HTMLButtonElement>("button.pick-candidate")
        .forEach((button) => {
          button.addEventListener("click", () => {
            void session.applyCandidate(Number(button.dataset.candidate));
          });
        });
    },
    onError: (panel, message) => {
      el("status").textContent = `${panel}: ${message}`;
    },
    onSlotsChanged: () => {
      el("status").textContent = "";
      if (!session.complete()) {
        el("chart-hint").textContent = "Pick all ten players to see the predicted outcome mix.";
      }
    },
  });

  const roster = await api.players();
  buildPickers(session, roster.players);

  el("seed").addEventListener("change", (event) => {
    session.seed = Number((event.target as HTMLInputElement).value) || 0;
  });
  el("sims").addEventListener("change", (event) => {
    session.sims = Number((event.target as HTMLInputElement).value) || 1000;
  });
  el("run-series").addEventListener("click", () => void session.runSeries());
  el("run-optimizer").addEventListener("click", () => {
    const pool = (el("pool") as HTMLInputElement).value
      .split(/[\s,;]+/)
      .filter(Boolean)
      .map(Number);
    session.candidatePool = pool;
    void session.runOptimizer();
  });
  el("export-replay").addEventListener("click", () => {
    const blob = new Blob([session.exportReplay()], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "studio-replay.json";
    link.click();
  });
  el("chart-hint").textContent = "Pick all ten players to see the predicted outcome mix.";
}

function buildPickers(session: StudioSession, players: PlayerInfo[]): void {
  // one shared datalist gives native search-as-you-type by player name;
  // the position rides along as a badge in the label
  const list = document.createElement("datalist");
  list.id = "roster";
  const labelToId = new Map<string, number>();
  for (const player of players) {
    const label = `${player.name} [${player.position}]`;
    labelToId.set(label, player.player_id);
    const option = document.createElement("option");
    option.value = label;
    list.appendChild(option);
  }
  document.body.appendChild(list);

  for (const side of ["offense", "defense"] as const) {
    const container = el(`${side}-slots`);
    container.innerHTML = "";
    for (let slot = 0; slot < 5; slot++) {
      const input = document.createElement("input");
      input.setAttribute("list", "roster");
      input.placeholder = `${side} slot ${slot + 1}`;
      input.dataset.side = side;
      input.dataset.slot = String(slot);
      input.addEventListener("change", () => {
        if (input.value === "") {
          session.setSlot(side, slot, null);
          return;
        }
        const id = labelToId.get(input.value);
        if (id === undefined) {
          el("status").textContent = `picker: no player named ${input.value}`;
          input.value = "";
          return;
        }
        if (!session.setSlot(side, slot, id)) {
          input.value = ""; // duplicate pick rejected before any request
        }
      });
      container.appendChild(input);
    }
  }
}

void boot();
