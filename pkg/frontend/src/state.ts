/**
 * Session state: current evidence, pinned scenarios, target, tornado
 * settings. Pure update functions return new state objects; pinned
 * scenarios are frozen snapshots and never change after pinning.
 * A monotone sequence number implements latest-wins rendering for
 * in-flight queries.
 */

import type { Evidence, ModelInfo, PosteriorPayload } from "./types.js";

export interface PinnedScenario {
  readonly label: string;
  readonly evidence: Readonly<Evidence>;
  readonly posterior: Readonly<PosteriorPayload>;
}

export interface SessionState {
  modelHash: string | null;
  target: string | null;
  evidence: Evidence;
  pinned: readonly PinnedScenario[];
  tornado: { state: string | null; window: number; topK: number };
}

export function initialState(): SessionState {
  return {
    modelHash: null,
    target: null,
    evidence: {},
    pinned: [],
    tornado: { state: null, window: 0.1, topK: 10 },
  };
}

export function connectModel(state: SessionState, model: ModelInfo): SessionState {
  const target = model.target ?? model.variables[0]?.name ?? null;
  const targetVar = model.variables.find((v) => v.name === target);
  return {
    ...state,
    modelHash: model.config_hash,
    target,
    evidence: {},
    tornado: { ...state.tornado, state: targetVar?.states.at(-1) ?? null },
  };
}

/** Set or clear (state === null) one variable's observed state. */
export function setEvidence(
  state: SessionState,
  variable: string,
  observed: string | null,
): SessionState {
  const evidence = { ...state.evidence };
  if (observed === null) {
    delete evidence[variable];
  } else {
    evidence[variable] = observed;
  }
  return { ...state, evidence };
}

export function clearEvidence(state: SessionState): SessionState {
  return { ...state, evidence: {} };
}

export function pinScenario(
  state: SessionState,
  label: string,
  posterior: PosteriorPayload,
  evidence: Evidence = state.evidence,
): SessionState {
  const pinned: PinnedScenario = Object.freeze({
    label,
    evidence: Object.freeze({ ...evidence }),
    posterior: Object.freeze(posterior),
  });
  return { ...state, pinned: [...state.pinned, pinned] };
}

export function unpinScenario(state: SessionState, index: number): SessionState {
  return { ...state, pinned: state.pinned.filter((_, i) => i !== index) };
}

export function setTornadoSettings(
  state: SessionState,
  settings: Partial<SessionState["tornado"]>,
): SessionState {
  return { ...state, tornado: { ...state.tornado, ...settings } };
}

/** True when a payload's hash no longer matches the connected model. */
export function isStale(state: SessionState, configHash: string): boolean {
  return state.modelHash !== null && configHash !== state.modelHash;
}

/** Latest-wins guard: superseded responses must not render. */
export class QuerySequencer {
  private counter = 0;

  next(): number {
    this.counter += 1;
    return this.counter;
  }

  isCurrent(seq: number): boolean {
    return seq === this.counter;
  }
}
