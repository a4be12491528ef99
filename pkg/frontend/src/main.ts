/**
 * Application wiring: fetch the model once, then route every user
 * action through the service and re-render from payloads. The UI never
 * computes a probability itself; each displayed number is the formatted
 * digits of one service response.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  buildEvidenceControls,
  buildPosteriorBars,
  renderEvidencePanel,
  renderImpossibleEvidence,
  renderPosteriorBars,
} from "./evidencePanel.js";
import { formatProbability } from "./format.js";
import { buildBoard, parseScenarioFile, renderScenarioBoard } from "./scenarioBoard.js";
import {
  QuerySequencer,
  type SessionState,
  clearEvidence,
  connectModel,
  initialState,
  isStale,
  pinScenario,
  setEvidence,
  setTornadoSettings,
  unpinScenario,
} from "./state.js";
import { buildTornadoBars, renderTornado } from "./tornadoView.js";
import { layoutNetwork, renderNetwork } from "./networkView.js";
import type { ModelInfo } from "./types.js";

const api = new ApiClient("");
let session: SessionState = initialState();
let model: ModelInfo | null = null;
let networkMode: "group" | "sensitivity" = "group";
let nodeScores: Record<string, number> | null = null;
const sequencer = new QuerySequencer();

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found;
}

function checkHash(configHash: string): void {
  if (isStale(session, configHash)) {
    el("stale-banner").hidden = false;
  }
}

async function refreshPosterior(): Promise<void> {
  if (!model || !session.target) return;
  const seq = sequencer.next();
  const panel = el("posterior");
  try {
    const payload = await api.query(session.target, session.evidence);
    if (!sequencer.isCurrent(seq)) return; // superseded; latest wins
    checkHash(payload.config_hash);
    const evidenceCount = Object.keys(session.evidence).length;
    renderPosteriorBars(
      el("posterior"),
      buildPosteriorBars(payload),
      evidenceCount === 0
        ? `${session.target} marginal`
        : `${session.target} | ${evidenceCount} observation(s), p(e) = ${formatProbability(payload.p_evidence)}`,
    );
  } catch (error) {
    if (!sequencer.isCurrent(seq)) return;
    if (error instanceof ApiError && error.impossibleEvidence) {
      const diag = error.impossibleEvidence;
      renderImpossibleEvidence(panel, diag.message, diag.culprits);
      return; // previous bars stay; session preserved
    }
    throw error;
  }
}

function rerenderEvidence(): void {
  if (!model) return;
  renderEvidencePanel(el("evidence"), buildEvidenceControls(model, session), {
    onEvidence(variable, state) {
      session = setEvidence(session, variable, state);
      void refreshPosterior();
    },
    onClearAll() {
      session = clearEvidence(session);
      rerenderEvidence();
      void refreshPosterior();
    },
  });
}

function rerenderScenarios(): void {
  renderScenarioBoard(el("scenarios"), buildBoard(session.pinned), {
    onUnpin(index) {
      session = unpinScenario(session, index);
      rerenderScenarios();
    },
  });
}

async function pinCurrentEvidence(): Promise<void> {
  if (!model || !session.target) return;
  const label = `pin ${session.pinned.length + 1}`;
  const payload = await api.scenario(label, session.target, session.evidence);
  checkHash(payload.config_hash);
  session = pinScenario(session, label, payload);
  rerenderScenarios();
}

async function loadScenarioFile(file: File): Promise<void> {
  if (!model || !session.target) return;
  const target = session.target;
  const entries = parseScenarioFile(await file.text());
  for (const entry of entries) {
    try {
      const payload = await api.scenario(entry.label, target, entry.evidence);
      checkHash(payload.config_hash);
      session = pinScenario(session, entry.label, payload, entry.evidence);
    } catch (error) {
      if (error instanceof ApiError && error.impossibleEvidence) {
        continue; // skip impossible profiles, keep the rest
      }
      throw error;
    }
  }
  rerenderScenarios();
}

async function refreshTornado(): Promise<void> {
  if (!model || !session.target || !session.tornado.state) return;
  const payload = await api.tornado(
    session.target,
    session.tornado.state,
    session.evidence,
    session.tornado.window,
    session.tornado.topK,
  );
  checkHash(payload.config_hash);
  renderTornado(
    el("tornado"),
    buildTornadoBars(payload),
    `P(${session.target} = ${session.tornado.state}) under single-entry perturbation`,
  );
}

function rerenderNetwork(): void {
  if (!model) return;
  renderNetwork(el("network"), layoutNetwork(model), networkMode, nodeScores, session.target, {
    onNodeClick(name) {
      const row = document.querySelector<HTMLElement>(`[data-variable="${name}"] select`);
      row?.focus();
    },
  });
}

function wireTornadoControls(): void {
  if (!model || !session.target) return;
  const stateSelect = el("tornado-state") as HTMLSelectElement;
  const targetVar = model.variables.find((v) => v.name === session.target);
  stateSelect.replaceChildren();
  for (const state of targetVar?.states ?? []) {
    const option = document.createElement("option");
    option.value = state;
    option.textContent = state;
    option.selected = state === session.tornado.state;
    stateSelect.appendChild(option);
  }
  stateSelect.addEventListener("change", () => {
    session = setTornadoSettings(session, { state: stateSelect.value });
    void refreshTornado();
  });
  const windowInput = el("tornado-window") as HTMLInputElement;
  windowInput.value = String(session.tornado.window);
  windowInput.addEventListener("change", () => {
    session = setTornadoSettings(session, { window: Number(windowInput.value) });
    void refreshTornado();
  });
  const topKInput = el("tornado-topk") as HTMLInputElement;
  topKInput.value = String(session.tornado.topK);
  topKInput.addEventListener("change", () => {
    session = setTornadoSettings(session, { topK: Number(topKInput.value) });
    void refreshTornado();
  });
}

async function start(): Promise<void> {
  model = await api.getModel();
  session = connectModel(session, model);
  el("model-hash").textContent = `model ${model.config_hash.slice(0, 12)} | target ${session.target}`;
  rerenderEvidence();
  rerenderScenarios();
  rerenderNetwork();
  wireTornadoControls();
  await refreshPosterior();
  await refreshTornado();

  el("pin-button").addEventListener("click", () => void pinCurrentEvidence());
  const fileInput = el("scenario-file") as HTMLInputElement;
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file) void loadScenarioFile(file);
  });
  el("color-toggle").addEventListener("click", () => {
    networkMode = networkMode === "group" ? "sensitivity" : "group";
    el("color-toggle").textContent =
      networkMode === "group" ? "color: variable group" : "color: sensitivity";
    rerenderNetwork();
  });
  const scoresInput = el("scores-file") as HTMLInputElement;
  scoresInput.addEventListener("change", async () => {
    const file = scoresInput.files?.[0];
    if (!file) return;
    // graph-json export from the CLI: nodes carry optional sensitivity
    const graph = JSON.parse(await file.text()) as {
      nodes: { id: string; sensitivity?: number }[];
    };
    nodeScores = {};
    for (const node of graph.nodes) {
      if (node.sensitivity !== undefined) nodeScores[node.id] = node.sensitivity;
    }
    networkMode = "sensitivity";
    rerenderNetwork();
  });
}

start().catch((error) => {
  el("model-hash").textContent = `failed to reach the inference service: ${error}`;
});
