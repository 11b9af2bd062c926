/** DOM wiring for the operator console; all logic lives in state.ts. */

import { FluidrankClient } from "./api.js";
import { rankingBars, studyErrorBars } from "./charts.js";
import { ConsoleController } from "./state.js";
import { timelineGeometry } from "./timeline.js";
import type { ConsoleState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function barChart(layout: ReturnType<typeof rankingBars>, cssClass: string): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width + 230} ${layout.height}`);
  svg.setAttribute("class", cssClass);
  for (const bar of layout.bars) {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", "0");
    rect.setAttribute("y", String(bar.y));
    rect.setAttribute("width", String(Math.max(bar.width, 1)));
    rect.setAttribute("height", String(bar.height));
    svg.appendChild(rect);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(layout.width + 6));
    label.setAttribute("y", String(bar.y + bar.height * 0.7));
    label.textContent = `${bar.label} — ${bar.sublabel}`;
    svg.appendChild(label);
  }
  return svg;
}

function renderRanking(state: ConsoleState, root: HTMLElement, controller: ConsoleController): void {
  root.replaceChildren();
  if (state.rankingError) {
    const banner = el("div", { class: "error" }, `ranking failed: ${state.rankingError}`);
    const retry = el("button", {}, "retry");
    retry.addEventListener("click", () => void controller.refreshRanking());
    banner.appendChild(retry);
    root.appendChild(banner);
    return;
  }
  if (!state.ranking) {
    root.appendChild(el("p", { class: "placeholder" }, "Move a slider to rank configurations."));
    return;
  }
  root.appendChild(barChart(rankingBars(state.ranking.rows), "ranking-chart"));
  const row = el("div", { class: "config-buttons" });
  for (const r of state.ranking.rows) {
    const btn = el("button", { "data-config": r.configuration_id }, `preview ${r.configuration_id}`);
    btn.addEventListener("click", () => {
      const task = state.catalog?.tasks.find((t) => t.id === state.taskId);
      const theta = (task?.axes ?? [4, 4]).map((k) => k - 1);
      void controller.selectConfiguration(r.configuration_id, theta);
    });
    row.appendChild(btn);
  }
  root.appendChild(row);
}

function renderPreview(state: ConsoleState, root: HTMLElement): void {
  root.replaceChildren();
  if (state.previewError) {
    root.appendChild(el("div", { class: "error" }, state.previewError));
    return;
  }
  if (!state.preview) {
    root.appendChild(el("p", { class: "placeholder" }, "Pick a configuration to preview its signals."));
    return;
  }
  const geo = timelineGeometry(state.preview.series);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${geo.width + 170} ${geo.height}`);
  svg.setAttribute("class", "timeline-chart");
  geo.paths.forEach((p, i) => {
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", p.points);
    svg.appendChild(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(geo.width + 6));
    label.setAttribute("y", String(i * geo.rowHeight + geo.rowHeight * 0.6));
    label.textContent = `${p.displayId} (peak ${p.maxKpa.toFixed(2)} kPa)`;
    svg.appendChild(label);
  });
  root.appendChild(
    el("p", {}, `θ = [${state.preview.theta.join(", ")}] → levels [${state.preview.point_indices.join(", ")}]`),
  );
  root.appendChild(svg);
}

function renderStudy(state: ConsoleState, root: HTMLElement): void {
  root.replaceChildren();
  root.appendChild(el("p", { class: "study-status" }, state.studyStatusText));
  if (!state.studyReport) return;
  for (const result of state.studyReport.results) {
    root.appendChild(el("h4", {}, `task ${result.task_id}`));
    root.appendChild(barChart(studyErrorBars(result.outcomes), "study-chart"));
  }
}

export function mount(root: HTMLElement, baseUrl = ""): ConsoleController {
  const controller = new ConsoleController(new FluidrankClient(baseUrl));

  const prefPanel = el("section", { class: "panel preferences" });
  prefPanel.appendChild(el("h3", {}, "Preferences"));
  for (const kind of ["pressure", "frequency", "area"] as const) {
    const wrap = el("label", { class: "slider-row" }, `${kind} `);
    const slider = el("input", {
      type: "range", min: "0", max: "1", step: "0.01", value: "1.0", "data-kind": kind,
    });
    const readout = el("span", { class: "value" }, "1.00");
    slider.addEventListener("input", () => {
      const v = Number(slider.value);
      readout.textContent = v.toFixed(2);
      controller.setPreference(kind, v);
    });
    wrap.appendChild(slider);
    wrap.appendChild(readout);
    prefPanel.appendChild(wrap);
  }
  const alphaInput = el("input", { type: "number", step: "0.05", value: "0.25" });
  alphaInput.addEventListener("change", () => controller.setAlpha(Number(alphaInput.value)));
  const betaInput = el("input", { type: "number", step: "1", value: "24" });
  betaInput.addEventListener("change", () => controller.setBeta(Number(betaInput.value)));
  const taskSelect = el("select", { class: "task-select" });
  taskSelect.addEventListener("change", () => controller.setTask(taskSelect.value));
  prefPanel.appendChild(el("label", {}, "alpha ")).appendChild(alphaInput);
  prefPanel.appendChild(el("label", {}, "beta ")).appendChild(betaInput);
  prefPanel.appendChild(el("label", {}, "task ")).appendChild(taskSelect);

  const rankingPanel = el("section", { class: "panel ranking" });
  rankingPanel.appendChild(el("h3", {}, "Ranking"));
  const rankingBody = el("div", { class: "body" });
  rankingPanel.appendChild(rankingBody);

  const previewPanel = el("section", { class: "panel preview" });
  previewPanel.appendChild(el("h3", {}, "Signal preview"));
  const previewBody = el("div", { class: "body" });
  previewPanel.appendChild(previewBody);

  const studyPanel = el("section", { class: "panel study" });
  studyPanel.appendChild(el("h3", {}, "Simulated study"));
  const trialsInput = el("input", { type: "number", value: "1000", min: "1" });
  const seedInput = el("input", { type: "number", value: "11" });
  const runButton = el("button", {}, "run study");
  runButton.addEventListener("click", () => {
    void controller.runStudy(Number(trialsInput.value), Number(seedInput.value));
  });
  studyPanel.appendChild(el("label", {}, "trials/config ")).appendChild(trialsInput);
  studyPanel.appendChild(el("label", {}, "seed ")).appendChild(seedInput);
  studyPanel.appendChild(runButton);
  const studyBody = el("div", { class: "body" });
  studyPanel.appendChild(studyBody);

  root.replaceChildren(prefPanel, rankingPanel, previewPanel, studyPanel);

  controller.subscribe((state) => {
    renderRanking(state, rankingBody, controller);
    renderPreview(state, previewBody);
    renderStudy(state, studyBody);
    if (state.catalog && taskSelect.childElementCount === 0) {
      for (const t of state.catalog.tasks) {
        taskSelect.appendChild(el("option", { value: t.id }, `${t.id} (${t.axes.join("x")})`));
      }
    }
  });

  void controller.loadCatalog();
  return controller;
}

declare global {
  interface Window {
    fluidrankConsole?: ConsoleController;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.fluidrankConsole = mount(document.getElementById("app")!);
}
