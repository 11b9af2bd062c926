/**
 * DOM-free console controller. The UI layer feeds it slider/input events
 * and subscribes to state changes; all HTTP traffic, debouncing, and
 * response superseding happen here so they stay unit-testable.
 */

import { FluidrankClient } from "./api.js";
import { SLIDER_DEBOUNCE_MS, debounce } from "./debounce.js";
import { LatestGate } from "./latest.js";
import { pollStudy } from "./poll.js";
import type {
  CatalogPayload,
  Preferences,
  PreviewPayload,
  RankingReport,
  StudyReport,
  StudyRunRequest,
} from "./types.js";
import { clamp01, studyRequestProblems, validAlpha, validBeta, validPreferences } from "./validate.js";

export interface ConsoleState {
  catalog: CatalogPayload | null;
  preferences: Preferences;
  alpha: number;
  beta: number;
  taskId: string;
  ranking: RankingReport | null;
  rankingError: string | null;
  preview: PreviewPayload | null;
  previewError: string | null;
  selectedConfiguration: string | null;
  studyStatusText: string;
  studyReport: StudyReport | null;
}

export type Listener = (state: ConsoleState) => void;

export class ConsoleController {
  state: ConsoleState = {
    catalog: null,
    preferences: { pressure: 1.0, frequency: 1.0, area: 1.0 },
    alpha: 0.25,
    beta: 24.0,
    taskId: "search",
    ranking: null,
    rankingError: null,
    preview: null,
    previewError: null,
    selectedConfiguration: null,
    studyStatusText: "idle",
    studyReport: null,
  };

  private listeners: Listener[] = [];
  private rankGate = new LatestGate();
  private previewGate = new LatestGate();
  private debouncedRank: { (): void; cancel(): void };

  constructor(
    private client: FluidrankClient,
    debounceMs: number = SLIDER_DEBOUNCE_MS,
  ) {
    this.debouncedRank = debounce(() => void this.refreshRanking(), debounceMs);
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const l of this.listeners) l(this.state);
  }

  private patch(partial: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  async loadCatalog(): Promise<void> {
    const catalog = await this.client.catalog();
    this.patch({ catalog });
    await this.refreshRanking();
  }

  /** Slider/numeric input path: clamp, patch, debounce a re-rank. */
  setPreference(kind: keyof Preferences, value: number): void {
    const preferences = { ...this.state.preferences, [kind]: clamp01(value) };
    this.patch({ preferences });
    this.debouncedRank();
  }

  setAlpha(alpha: number): void {
    if (!validAlpha(alpha)) return;
    this.patch({ alpha });
    this.debouncedRank();
  }

  setBeta(beta: number): void {
    if (!validBeta(beta)) return;
    this.patch({ beta });
    this.debouncedRank();
  }

  setTask(taskId: string): void {
    this.patch({ taskId, preview: null, selectedConfiguration: null });
    this.debouncedRank();
  }

  /** Issue a rank request now; stale responses never render. */
  async refreshRanking(): Promise<void> {
    const { preferences, alpha, beta, taskId } = this.state;
    if (!validPreferences(preferences) || !validAlpha(alpha) || !validBeta(beta)) {
      this.patch({ rankingError: "preferences must lie in [0, 1]" });
      return;
    }
    const id = this.rankGate.issue();
    try {
      const ranking = await this.client.rank({ preferences, alpha, beta, task_id: taskId });
      if (!this.rankGate.isCurrent(id)) return;
      this.patch({ ranking, rankingError: null });
    } catch (err) {
      if (!this.rankGate.isCurrent(id)) return;
      this.patch({ rankingError: String(err) });
    }
  }

  async selectConfiguration(configurationId: string, theta: number[]): Promise<void> {
    this.patch({ selectedConfiguration: configurationId });
    const id = this.previewGate.issue();
    try {
      const preview = await this.client.preview({
        configuration_id: configurationId,
        theta,
        task_id: this.state.taskId,
      });
      if (!this.previewGate.isCurrent(id)) return;
      this.patch({ preview, previewError: null });
    } catch (err) {
      if (!this.previewGate.isCurrent(id)) return;
      this.patch({ preview: null, previewError: String(err) });
    }
  }

  /** Launch a study from the current profile and poll it to completion. */
  async runStudy(trialsPerConfig: number, masterSeed: number): Promise<void> {
    const request: StudyRunRequest = {
      tasks: [this.state.taskId],
      trials_per_config: trialsPerConfig,
      decode_mode: "map",
      master_seed: masterSeed,
      profiles: [{ ...this.state.preferences, alpha: this.state.alpha, beta: this.state.beta }],
    };
    const problems = studyRequestProblems(request);
    if (problems.length) {
      this.patch({ studyStatusText: `rejected: ${problems.join("; ")}` });
      return;
    }
    this.patch({ studyStatusText: "launching", studyReport: null });
    try {
      const { report_id } = await this.client.runStudy(request);
      this.patch({ studyStatusText: `running ${report_id}` });
      const done = await pollStudy((id) => this.client.studyStatus(id), report_id);
      if (done.status === "done") {
        this.patch({ studyStatusText: `done ${report_id}`, studyReport: done.report });
      } else {
        this.patch({ studyStatusText: `failed: ${"error" in done ? done.error : done.status}` });
      }
    } catch (err) {
      this.patch({ studyStatusText: `failed: ${String(err)}` });
    }
  }
}
