/** DOM wiring: inputs -> request bodies -> service -> canvas/chart updates. */

import { ServiceClient, VisibilityResponse, ResolutionResponse, ApiError } from "./api.js";
import { DEFAULT_STATE, PanelState, validateState, visibilityRequestBody, resolutionRequestBody } from "./panel.js";
import { RequestScheduler } from "./scheduler.js";
import { heatmapRgba, rowCut, resolutionSeries, resolutionCsv, formatMagnification } from "./views.js";

const baseUrl = (window as any).QIUPSIM_SERVICE_URL ?? "http://127.0.0.1:8000";
const client = new ServiceClient(baseUrl);

const state: PanelState = { ...DEFAULT_STATE };
let lastResolution: ResolutionResponse | null = null;
let selectedRow: number | undefined;

const el = (id: string) => document.getElementById(id)!;
const canvas = el("heatmap") as HTMLCanvasElement;
const cutCanvas = el("rowcut") as HTMLCanvasElement;
const chartCanvas = el("reschart") as HTMLCanvasElement;

function showError(message: string): void {
  el("status").textContent = message;
}

function drawHeatmap(resp: VisibilityResponse): void {
  const { grid, summary } = resp;
  canvas.width = grid.width;
  canvas.height = grid.height;
  const ctx = canvas.getContext("2d")!;
  ctx.putImageData(new ImageData(heatmapRgba(grid), grid.width, grid.height), 0, 0);
  el("magnification").textContent = formatMagnification(summary.magnification);
  el("range").textContent = `V in [${summary.min.toFixed(3)}, ${summary.max.toFixed(3)}]`;
  el("status").textContent = "";
  drawCut(resp);
}

function drawCut(resp: VisibilityResponse): void {
  const cut = rowCut(resp.grid, selectedRow);
  const ctx = cutCanvas.getContext("2d")!;
  const { width, height } = cutCanvas;
  ctx.clearRect(0, 0, width, height);
  ctx.beginPath();
  cut.values.forEach((v, i) => {
    const x = (i / (cut.values.length - 1)) * width;
    const y = height - Math.min(1, Math.max(0, v)) * height;
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  });
  ctx.stroke();
  el("cutlabel").textContent = `row ${cut.row}`;
}

let lastVisibility: VisibilityResponse | null = null;
const visibilityScheduler = new RequestScheduler<VisibilityResponse>(
  (signal) => client.visibility(visibilityRequestBody(state), signal),
  (resp) => {
    lastVisibility = resp;
    drawHeatmap(resp);
  },
  (err) => showError(err instanceof ApiError ? err.message : String(err)),
);

function refresh(): void {
  const problems = validateState(state);
  if (problems.length > 0) {
    showError(problems.join("; "));
    return;
  }
  visibilityScheduler.request();
}

function bindNumber(id: string, apply: (v: number) => void): void {
  const input = el(id) as HTMLInputElement;
  input.addEventListener("input", () => {
    apply(Number(input.value));
    refresh();
  });
}

bindNumber("waist", (v) => (state.waistUm = v));
bindNumber("shift", (v) => (state.shiftMm = v));
bindNumber("slitwidth", (v) => (state.slitWidthUm = v));
(el("preset") as HTMLSelectElement).addEventListener("change", (e) => {
  state.preset = (e.target as HTMLSelectElement).value as PanelState["preset"];
  refresh();
});
(el("object") as HTMLSelectElement).addEventListener("change", (e) => {
  state.object = (e.target as HTMLSelectElement).value as PanelState["object"];
  refresh();
});

canvas.addEventListener("click", (e) => {
  const rect = canvas.getBoundingClientRect();
  selectedRow = Math.floor(((e.clientY - rect.top) / rect.height) * canvas.height);
  if (lastVisibility) drawCut(lastVisibility);
});

function drawResolution(resp: ResolutionResponse): void {
  const series = resolutionSeries(resp.points, "d_limit");
  const ctx = chartCanvas.getContext("2d")!;
  const { width, height } = chartCanvas;
  ctx.clearRect(0, 0, width, height);
  if (series.points.length === 0) {
    ctx.fillText("no resolvable points", 10, height / 2);
    return;
  }
  const xs = series.points.map((p) => p.x);
  const ys = series.points.map((p) => p.y);
  const xMin = Math.min(...xs), xMax = Math.max(...xs);
  const yMax = Math.max(...ys);
  ctx.beginPath();
  series.points.forEach((p, i) => {
    const x = ((p.x - xMin) / Math.max(1e-9, xMax - xMin)) * (width - 20) + 10;
    const y = height - (p.y / yMax) * (height - 20) - 10;
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  });
  ctx.stroke();
}

el("sweep").addEventListener("click", async () => {
  const waists = [100, 200, 300, 400];
  const deconvolve = (el("deconvolve") as HTMLInputElement).checked;
  try {
    const resp = await client.resolution(resolutionRequestBody(state, waists, deconvolve));
    lastResolution = resp;
    drawResolution(resp);
  } catch (err) {
    showError(err instanceof ApiError ? err.message : String(err));
  }
});

el("exportcsv").addEventListener("click", () => {
  if (!lastResolution) return;
  const blob = new Blob([resolutionCsv(lastResolution)], { type: "text/csv" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "resolution.csv";
  a.click();
  URL.revokeObjectURL(a.href);
});

refresh();
