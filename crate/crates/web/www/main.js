import init, { populationTrace, yieldCurve, gateCount } from "./pkg/rpdqs_web.js";

const $ = (id) => document.getElementById(id);
const status = (msg) => { $("status").textContent = msg; };

function params() {
  return [
    Number($("field").value),
    Number($("rate").value),
    Math.max(0, Math.floor(Number($("steps").value))),
    $("noisy").checked,
  ];
}

// pts is [x0, y0, x1, y1, ...]
function plot(canvas, pts, xLabel, yLabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const xs = [], ys = [];
  for (let i = 0; i < pts.length; i += 2) { xs.push(pts[i]); ys.push(pts[i + 1]); }
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  let y0 = Math.min(...ys), y1 = Math.max(...ys);
  if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
  const sx = (x) => pad + (w - 2 * pad) * (x - x0) / ((x1 - x0) || 1);
  const sy = (y) => h - pad - (h - 2 * pad) * (y - y0) / (y1 - y0);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(y0.toPrecision(3), 2, h - pad);
  ctx.fillText(x0.toPrecision(3), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(3), w - pad - 24, h - pad + 14);
  ctx.fillText(xLabel, w / 2 - 20, h - 8);
  ctx.fillText(yLabel, pad + 4, pad - 8);

  ctx.strokeStyle = "#1f5fbf";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
}

function timed(label, f) {
  const t = performance.now();
  try {
    f();
    status(`${label}: ${(performance.now() - t).toFixed(0)} ms`);
  } catch (e) {
    status(`${label} failed: ${e.message ?? e}`);
  }
}

function drawTrace() {
  const deg = Number($("theta").value);
  $("theta-out").textContent = deg;
  timed("population", () => {
    plot($("trace"), populationTrace(...params(), deg * Math.PI / 180), "t (µs)", "P_S · e^{-kt}");
  });
}

function runSweep() {
  timed("yield sweep", () => {
    const out = yieldCurve(...params(), Math.floor(Number($("count").value)));
    $("aniso").textContent = out[0].toFixed(5);
    plot($("curve"), out.subarray(1), "θ (rad)", "Φ_S");
  });
}

function countGates() {
  timed("gate count", () => {
    const [total, trotter] = gateCount(Math.PI / 4, Math.floor(Number($("gc-steps").value)), $("gc-prune").checked);
    $("gc-out").textContent = `${total} total, ${trotter} in Trotter steps`;
  });
}

await init();
for (const id of ["field", "rate", "steps", "noisy", "theta"]) $(id).addEventListener("input", drawTrace);
for (const id of ["gc-steps", "gc-prune"]) $(id).addEventListener("input", countGates);
$("sweep").addEventListener("click", runSweep);
drawTrace();
runSweep();
countGates();
