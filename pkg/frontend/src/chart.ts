/**
 * The 23-bar outcome distribution chart.
 *
 * buildChartModel is pure: same probabilities in, same model out. The
 * renderer turns a model into static HTML, so "the chart is unchanged"
 * is literal string equality in tests. Bars are grouped by the taxonomy
 * sections (mid-range / close-range / free throws / threes / other).
 */

import type { OutcomeClass } from "./types.js";

export interface ChartBar {
  index: number;
  label: string;
  value: number;
}

export interface ChartSection {
  title: string;
  bars: ChartBar[];
}

export interface ChartModel {
  sections: ChartSection[];
  total: number;
}

const SECTION_OF = (label: string): string => {
  if (label.startsWith("Mid-range")) return "Mid-range";
  if (label.startsWith("Close-range")) return "Close-range";
  if (label.includes("free throws made")) return "Free throws";
  if (label.startsWith("3PT")) return "Three-pointers";
  return "Other";
};

const SECTION_ORDER = ["Mid-range", "Close-range", "Free throws", "Three-pointers", "Other"];

export function buildChartModel(probabilities: number[], classes: OutcomeClass[]): ChartModel {
  const sections = new Map<string, ChartBar[]>(SECTION_ORDER.map((s) => [s, []]));
  classes.forEach((cls) => {
    sections.get(SECTION_OF(cls.label))!.push({
      index: cls.index,
      label: cls.label,
      value: probabilities[cls.index],
    });
  });
  return {
    sections: SECTION_ORDER.map((title) => ({ title, bars: sections.get(title)! })),
    total: probabilities.reduce((a, b) => a + b, 0),
  };
}

export function renderChartHtml(model: ChartModel): string {
  const rows = model.sections
    .map((section) => {
      const bars = section.bars
        .map((bar) => {
          const pct = (100 * bar.value).toFixed(1);
          const width = Math.max(0.5, 100 * bar.value).toFixed(2);
          return (
            `<div class="bar-row" data-class="${bar.index}">` +
            `<span class="bar-label">${bar.label}</span>` +
            `<span class="bar-track"><span class="bar-fill" style="width:${width}%"></span></span>` +
            `<span class="bar-value">${pct}%</span>` +
            `</div>`
          );
        })
        .join("");
      return `<div class="bar-section"><h4>${section.title}</h4>${bars}</div>`;
    })
    .join("");
  return `<div class="outcome-chart">${rows}</div>`;
}
