/** Payload shapes of the fluidrank HTTP API (documented in docs/api_reference.md). */

export interface ModalityInfo {
  kind: string;
  levels: number[];
}

export interface ConfigurationInfo {
  id: string;
  channels: string[];
  level_counts: number[];
  space_size: number;
}

export interface TaskInfo {
  id: string;
  axes: number[];
}

export interface CatalogPayload {
  modalities: ModalityInfo[];
  configurations: ConfigurationInfo[];
  tasks: TaskInfo[];
}

export interface Preferences {
  pressure: number;
  frequency: number;
  area: number;
}

export interface RankRequest {
  preferences: Preferences;
  task_id: string;
  alpha: number;
  beta: number;
}

export interface RankingRow {
  configuration_id: string;
  channel_kinds: string[];
  rank: number;
  mi_nats: number;
  mi_bits: number;
  marginal_entropy_nats: number;
  conditional_entropy_nats: number;
  diagnostics: { first_term_nats: number };
}

export interface RankingReport {
  task_id: string;
  alpha: number;
  beta: number;
  preferences: Record<string, number>;
  rows: RankingRow[];
}

export interface PreviewRequest {
  configuration_id: string;
  theta: number[];
  task_id: string;
  seconds_per_channel?: number;
}

export interface TimelineSeries {
  display_id: string;
  times_s: number[];
  kpa: number[];
}

export interface PreviewPayload {
  configuration_id: string;
  task_id: string;
  theta: number[];
  point_indices: number[];
  series: TimelineSeries[];
}

export interface StudyRunRequest {
  tasks: string[];
  trials_per_config: number;
  decode_mode: "map" | "sample";
  master_seed: number;
  profiles: number | Array<Preferences & { alpha?: number; beta?: number }>;
  configuration_ids?: string[];
}

export interface RankOutcome {
  rank: number;
  configuration_id: string;
  mi_nats: number;
  mean_squared_error: number;
  sd_squared_error: number;
  mean_manhattan: number;
  sd_manhattan: number;
}

export interface StudyReport {
  study: {
    tasks: string[];
    trials_per_config: number;
    decode_mode: string;
    master_seed: number;
    jitter: boolean;
    n_profiles: number;
  };
  rank1_counts: Record<string, Record<string, number>>;
  rank1_vs_rank3: Record<string, number>;
  results: Array<{
    profile_index: number;
    task_id: string;
    profile: Record<string, number>;
    outcomes: RankOutcome[];
  }>;
}

export type StudyStatus =
  | { report_id: string; status: "running" }
  | { report_id: string; status: "done"; report: StudyReport }
  | { report_id: string; status: "error"; error: string };
