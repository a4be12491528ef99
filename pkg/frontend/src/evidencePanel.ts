/**
 * Evidence controls (one select per variable) and the posterior bar
 * view. View-model builders are pure; the render functions below only
 * translate view models into DOM.
 */

import { formatProbability, toPercent } from "./format.js";
import type { SessionState } from "./state.js";
import type { ModelInfo, PosteriorPayload } from "./types.js";

export const UNSET = "(any)";

export interface EvidenceControl {
  variable: string;
  group: string;
  options: string[]; // UNSET first, then states in declaration order
  selected: string; // UNSET or a state label
  isTarget: boolean;
}

export function buildEvidenceControls(
  model: ModelInfo,
  state: SessionState,
): EvidenceControl[] {
  return model.variables.map((v) => ({
    variable: v.name,
    group: v.group,
    options: [UNSET, ...v.states],
    selected: state.evidence[v.name] ?? UNSET,
    isTarget: v.name === state.target,
  }));
}

export interface PosteriorBar {
  state: string;
  probability: number;
  display: string; // exact payload digits
  widthPercent: number;
}

export function buildPosteriorBars(payload: PosteriorPayload): PosteriorBar[] {
  return payload.states.map((state, i) => {
    const p = payload.probabilities[i] ?? 0;
    return {
      state,
      probability: p,
      display: formatProbability(p),
      widthPercent: toPercent(p),
    };
  });
}

export interface EvidencePanelCallbacks {
  onEvidence(variable: string, state: string | null): void;
  onClearAll(): void;
}

export function renderEvidencePanel(
  root: HTMLElement,
  controls: EvidenceControl[],
  callbacks: EvidencePanelCallbacks,
): void {
  root.replaceChildren();
  const clear = document.createElement("button");
  clear.textContent = "clear all evidence";
  clear.className = "clear-all";
  clear.addEventListener("click", () => callbacks.onClearAll());
  root.appendChild(clear);

  for (const control of controls) {
    if (control.isTarget) continue;
    const row = document.createElement("label");
    row.className = "evidence-row";
    row.dataset.variable = control.variable;
    const name = document.createElement("span");
    name.textContent = control.variable;
    name.title = `group: ${control.group}`;
    const select = document.createElement("select");
    for (const option of control.options) {
      const el = document.createElement("option");
      el.value = option;
      el.textContent = option;
      el.selected = option === control.selected;
      select.appendChild(el);
    }
    select.addEventListener("change", () => {
      callbacks.onEvidence(control.variable, select.value === UNSET ? null : select.value);
    });
    row.append(name, select);
    root.appendChild(row);
  }
}

export function renderPosteriorBars(
  root: HTMLElement,
  bars: PosteriorBar[],
  heading: string,
): void {
  root.replaceChildren();
  const title = document.createElement("h3");
  title.textContent = heading;
  root.appendChild(title);
  for (const bar of bars) {
    const row = document.createElement("div");
    row.className = "bar-row";
    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = bar.state;
    const track = document.createElement("div");
    track.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    fill.style.width = `${bar.widthPercent}%`;
    track.appendChild(fill);
    const value = document.createElement("span");
    value.className = "bar-value";
    value.textContent = bar.display;
    row.append(label, track, value);
    root.appendChild(row);
  }
}

export function renderImpossibleEvidence(
  root: HTMLElement,
  message: string,
  culprits: string[],
): void {
  const box = document.createElement("div");
  box.className = "impossible";
  box.textContent =
    culprits.length > 0
      ? `impossible evidence; removing any one of [${culprits.join(", ")}] restores possibility`
      : `impossible evidence: ${message}`;
  root.prepend(box);
}
