/**
 * Horizontal tornado bars ordered by range width (the service already
 * ranks them; ordering is asserted, not re-derived). Hovering a bar
 * reveals the parameter handle and its low/high values; the baseline
 * posterior is marked on every bar.
 */

import { formatProbability } from "./format.js";
import type { TornadoEntry, TornadoPayload } from "./types.js";

export interface TornadoBar {
  parameter: string;
  width: number;
  low: number;
  high: number;
  baseline: number;
  hover: string; // parameter handle plus exact low/high digits
  leftPercent: number;
  widthPercent: number;
  baselinePercent: number;
}

export function buildTornadoBars(payload: TornadoPayload): TornadoBar[] {
  const bars = payload.entries.map(toBar);
  for (let i = 1; i < bars.length; i++) {
    const previous = bars[i - 1];
    const current = bars[i];
    if (previous && current && current.width > previous.width) {
      throw new Error("tornado entries must arrive sorted by width");
    }
  }
  return bars;
}

function toBar(entry: TornadoEntry): TornadoBar {
  return {
    parameter: entry.parameter,
    width: entry.width,
    low: entry.low,
    high: entry.high,
    baseline: entry.baseline,
    hover: `${entry.parameter}  low=${formatProbability(entry.low)}  high=${formatProbability(entry.high)}`,
    leftPercent: entry.low * 100,
    widthPercent: Math.max(entry.width * 100, 0.2),
    baselinePercent: entry.baseline * 100,
  };
}

export interface TornadoSettingsCallbacks {
  onSettings(settings: { state?: string; window?: number; topK?: number }): void;
}

export function renderTornado(root: HTMLElement, bars: TornadoBar[], title: string): void {
  root.replaceChildren();
  const heading = document.createElement("h3");
  heading.textContent = title;
  root.appendChild(heading);
  if (bars.length === 0) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "no perturbable parameters moved the event probability";
    root.appendChild(hint);
    return;
  }
  for (const bar of bars) {
    const row = document.createElement("div");
    row.className = "tornado-row";
    row.title = bar.hover;
    const label = document.createElement("span");
    label.className = "tornado-label";
    label.textContent = bar.parameter;
    const track = document.createElement("div");
    track.className = "tornado-track";
    const fill = document.createElement("div");
    fill.className = "tornado-fill";
    fill.style.left = `${bar.leftPercent}%`;
    fill.style.width = `${bar.widthPercent}%`;
    const baseline = document.createElement("div");
    baseline.className = "tornado-baseline";
    baseline.style.left = `${bar.baselinePercent}%`;
    track.append(fill, baseline);
    const width = document.createElement("span");
    width.className = "tornado-width";
    width.textContent = formatProbability(bar.width);
    row.append(label, track, width);
    root.appendChild(row);
  }
}
