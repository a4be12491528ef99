/**
 * Side-by-side stacked bars, one per pinned scenario, segments over the
 * target's states in declaration order. Loading a scenario file (the
 * CLI schema) pre-pins every entry.
 */

import { formatProbability, toPercent } from "./format.js";
import type { PinnedScenario } from "./state.js";
import type { ScenarioFile } from "./types.js";

export interface StackedSegment {
  state: string;
  probability: number;
  display: string;
  widthPercent: number;
  colorIndex: number;
}

export interface ScenarioBar {
  label: string;
  evidenceSummary: string;
  segments: StackedSegment[];
}

export function buildScenarioBar(pinned: PinnedScenario): ScenarioBar {
  const segments = pinned.posterior.states.map((state, i) => {
    const p = pinned.posterior.probabilities[i] ?? 0;
    return {
      state,
      probability: p,
      display: formatProbability(p),
      widthPercent: toPercent(p),
      colorIndex: i,
    };
  });
  const evidenceSummary = Object.keys(pinned.evidence)
    .sort()
    .map((k) => `${k}=${pinned.evidence[k]}`)
    .join(", ");
  return { label: pinned.label, evidenceSummary, segments };
}

export function buildBoard(pinned: readonly PinnedScenario[]): ScenarioBar[] {
  return pinned.map(buildScenarioBar);
}

export function parseScenarioFile(text: string): { label: string; evidence: Record<string, string> }[] {
  const parsed = JSON.parse(text) as ScenarioFile;
  if (!parsed || !Array.isArray(parsed.scenarios)) {
    throw new Error("scenario file needs a top-level 'scenarios' list");
  }
  return parsed.scenarios.map((s, i) => {
    if (typeof s.label !== "string" || typeof s.evidence !== "object" || s.evidence === null) {
      throw new Error(`scenario #${i} needs 'label' and 'evidence'`);
    }
    return { label: s.label, evidence: { ...s.evidence } };
  });
}

const SEGMENT_COLORS = [
  "#2a4d69",
  "#4b86b4",
  "#adcbe3",
  "#e7eff6",
  "#f0c987",
  "#d1603d",
];

export interface ScenarioBoardCallbacks {
  onUnpin(index: number): void;
}

export function renderScenarioBoard(
  root: HTMLElement,
  bars: ScenarioBar[],
  callbacks: ScenarioBoardCallbacks,
): void {
  root.replaceChildren();
  if (bars.length === 0) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "pin the current evidence or load a scenario file to compare";
    root.appendChild(hint);
    return;
  }
  bars.forEach((bar, index) => {
    const row = document.createElement("div");
    row.className = "scenario-row";
    const head = document.createElement("div");
    head.className = "scenario-head";
    const label = document.createElement("strong");
    label.textContent = bar.label;
    label.title = bar.evidenceSummary || "no evidence";
    const unpin = document.createElement("button");
    unpin.textContent = "unpin";
    unpin.addEventListener("click", () => callbacks.onUnpin(index));
    head.append(label, unpin);
    const track = document.createElement("div");
    track.className = "stacked-track";
    for (const segment of bar.segments) {
      const el = document.createElement("div");
      el.className = "stacked-segment";
      el.style.width = `${segment.widthPercent}%`;
      el.style.background = SEGMENT_COLORS[segment.colorIndex % SEGMENT_COLORS.length] ?? "#999";
      el.title = `${segment.state}: ${segment.display}`;
      track.appendChild(el);
    }
    row.append(head, track);
    root.appendChild(row);
  });
}
