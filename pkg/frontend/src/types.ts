/** Payload shapes of the inference service (all JSON, UTF-8). */

export interface VariableInfo {
  name: string;
  states: string[];
  group: string;
}

export interface ArcInfo {
  parent: string;
  child: string;
  strength?: number;
}

export interface ModelInfo {
  config_hash: string;
  target: string | null;
  variables: VariableInfo[];
  arcs: ArcInfo[];
}

export interface PosteriorPayload {
  config_hash: string;
  target: string;
  states: string[];
  probabilities: number[];
  p_evidence: number;
}

export interface ScenarioPayload extends PosteriorPayload {
  label: string;
}

export interface MpePayload {
  config_hash: string;
  assignment: Record<string, string>;
  probability: number;
}

export interface ScanEntry {
  variable: string;
  state: string;
  divergence: number;
  probabilities: number[];
}

export interface ScanPayload {
  config_hash: string;
  target: string;
  states: string[];
  marginal: number[];
  entries: ScanEntry[];
  impossible: [string, string][];
}

export interface TornadoEntry {
  parameter: string;
  node: string;
  row: number;
  col: number;
  width: number;
  low: number;
  high: number;
  baseline: number;
  theta0: number;
}

export interface TornadoPayload {
  config_hash: string;
  target: string;
  state: string;
  entries: TornadoEntry[];
}

export interface ImpossibleEvidencePayload {
  error: "impossible_evidence";
  message: string;
  culprits: string[];
  config_hash: string;
}

/** Scenario file schema, shared verbatim with the CLI. */
export interface ScenarioFile {
  scenarios: { label: string; evidence: Record<string, string> }[];
}

export type Evidence = Record<string, string>;
