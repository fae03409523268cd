// Build the bindings first: see the README ("Browser demo").
import init, { Chain, ratioReferences } from "./pkg/ethspec_web.js";

const $ = (id) => document.getElementById(id);
const BINS = 10;
let chain = null;

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
}

// Draws y(x) for x in [0, xmax], y in [0, ymax].
function line(ctx, xs, ys, xmax, ymax, color, pad) {
  const { width: w, height: h } = ctx.canvas;
  const px = (x) => pad + (x / xmax) * (w - 1.5 * pad);
  const py = (y) => h - pad - (y / ymax) * (h - 1.5 * pad);
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  xs.forEach((x, k) => (k ? ctx.lineTo(px(x), py(ys[k])) : ctx.moveTo(px(x), py(ys[k]))));
  ctx.stroke();
  ctx.lineWidth = 1;
}

function drawRatios() {
  const ctx = $("ratios").getContext("2d");
  const pad = 30;
  axes(ctx, ctx.canvas.width, ctx.canvas.height, pad);
  const out = chain.levelRatios(BINS);
  const n = 101;
  const refs = ratioReferences(n);
  const grid = Array.from({ length: n }, (_, k) => k / (n - 1));
  const ymax = 2.2;
  line(ctx, grid, refs.slice(0, n), 1, ymax, "#999", pad);
  line(ctx, grid, refs.slice(n), 1, ymax, "#d62728", pad);
  const xs = [], ys = [];
  for (let b = 0; b < BINS; b++) {
    xs.push(b / BINS, (b + 1) / BINS);
    ys.push(out[1 + b], out[1 + b]);
  }
  line(ctx, xs, ys, 1, ymax, "#1f77b4", pad);
  $("ratios-text").textContent = `⟨r⟩ = ${out[0].toFixed(3)} (Poisson 0.386, GOE 0.536)`;
}

function drawBlock() {
  const ctx = $("block-canvas").getContext("2d");
  const m = Number($("block").value);
  let out;
  try {
    out = chain.submatrix($("observable").value, m);
  } catch (e) {
    ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
    $("block-text").textContent = String(e.message ?? e);
    return;
  }
  const cells = out.slice(2);
  const max = Math.max(...cells) || 1;
  const side = Math.min(ctx.canvas.width, ctx.canvas.height);
  const cell = side / m;
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (let i = 0; i < m; i++) {
    for (let j = 0; j < m; j++) {
      const v = Math.sqrt(cells[i * m + j] / max);
      const c = Math.round(255 * (1 - v));
      ctx.fillStyle = `rgb(${c},${c},255)`;
      ctx.fillRect(j * cell, i * cell, Math.ceil(cell), Math.ceil(cell));
    }
  }
  $("block-text").textContent = `pooled block ⟨r⟩ = ${out[0].toFixed(3)} over ${out[1]} blocks of ${m}×${m}`;
}

function drawEntropy() {
  const ctx = $("entropy").getContext("2d");
  const pad = 30;
  axes(ctx, ctx.canvas.width, ctx.canvas.height, pad);
  const states = Math.max(1, Math.min(chain.dim(), Number($("states").value) || 1));
  const out = chain.entropy(states);
  const l = out.length / 2 - 1;
  const xs = Array.from({ length: l + 1 }, (_, k) => k);
  line(ctx, xs, out.slice(l + 1), l, 1.1, "#d62728", pad);
  line(ctx, xs, out.slice(0, l + 1), l, 1.1, "#1f77b4", pad);
}

function redraw() {
  if (!chain) return;
  drawRatios();
  drawBlock();
  drawEntropy();
}

function diagonalize() {
  const sites = Number($("sites").value);
  const field = Number($("field").value);
  $("status").textContent = `diagonalizing 2^${sites} levels…`;
  // let the status text paint before the blocking call
  setTimeout(() => {
    const t0 = performance.now();
    try {
      chain?.free();
      chain = new Chain(sites, field);
      $("status").textContent = `L = ${sites}, h = ${field.toFixed(2)}: ${chain.dim()} levels in ${((performance.now() - t0) / 1000).toFixed(1)} s`;
      redraw();
    } catch (e) {
      chain = null;
      $("status").textContent = String(e.message ?? e);
    }
  }, 20);
}

await init();
$("field").addEventListener("input", () => ($("field-out").textContent = Number($("field").value).toFixed(2)));
$("diagonalize").addEventListener("click", diagonalize);
$("observable").addEventListener("change", () => chain && drawBlock());
$("block").addEventListener("change", () => chain && drawBlock());
$("states").addEventListener("change", () => chain && drawEntropy());
diagonalize();
