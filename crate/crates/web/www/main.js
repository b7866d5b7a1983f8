import init, { simulate_cell, concentration_curves, variance_budget } from "./pkg/fsval_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// Draws each series as a polyline; xs is shared.
function plot(canvas, xs, series, { logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 50;
  ctx.clearRect(0, 0, w, h);
  const tf = logY ? (v) => Math.log10(Math.max(v, 1e-300)) : (v) => v;
  const ys = series.flatMap((s) => s.values.map(tf)).filter(Number.isFinite);
  let lo = Math.min(...ys), hi = Math.max(...ys);
  if (hi === lo) { lo -= 1; hi += 1; }
  const x0 = xs[0], x1 = xs[xs.length - 1] === x0 ? x0 + 1 : xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad + ((lo - y) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#000";
  ctx.font = "11px sans-serif";
  const fmt = (v) => (logY ? "1e" + v.toFixed(1) : v.toPrecision(4));
  ctx.fillText(fmt(hi), 2, pad + 4);
  ctx.fillText(fmt(lo), 2, h - pad);
  ctx.fillText(String(x0), pad, h - pad + 15);
  ctx.fillText(String(x1), w - pad - 20, h - pad + 15);

  series.forEach((s, i) => {
    ctx.strokeStyle = s.color ?? COLORS[i % COLORS.length];
    ctx.beginPath();
    s.values.forEach((v, j) => {
      const y = tf(v);
      if (j === 0) ctx.moveTo(px(xs[j]), py(y));
      else ctx.lineTo(px(xs[j]), py(y));
    });
    ctx.stroke();
  });
}

function legend(el, names) {
  el.innerHTML = names
    .map((n, i) => `<span style="color:${COLORS[i % COLORS.length]}">&#9632; ${n}</span>`)
    .join("");
}

function guarded(statusId, fn) {
  return () => {
    const status = $(statusId);
    status.className = "";
    status.textContent = "";
    try {
      fn(status);
    } catch (e) {
      status.className = "error";
      status.textContent = String(e);
    }
  };
}

let lastCell = null;

function drawCell() {
  if (!lastCell) return;
  const by = lastCell.series[$("metric").value];
  const names = Object.keys(by);
  const xs = by[names[0]].map((_, i) => i + 1);
  plot($("cell-plot"), xs, names.map((m) => ({ values: by[m] })));
  legend($("cell-legend"), names);
}

$("run-cell").onclick = guarded("cell-status", (status) => {
  const started = performance.now();
  lastCell = JSON.parse(
    simulate_cell(num("n"), num("t"), num("k"), num("reps"), num("alpha"), BigInt(num("seed")), $("shared").checked),
  );
  const ms = (performance.now() - started).toFixed(0);
  status.textContent = `L* = ${lastCell.fsv_compounded.toFixed(4)} (${ms} ms)`;
  $("cell-table").textContent = lastCell.table;
  drawCell();
});
$("metric").onchange = drawCell;

$("run-conc").onclick = guarded("conc-status", (status) => {
  const r = JSON.parse(
    concentration_curves(num("c-var"), num("c-a"), num("c-b"), num("c-eps"), num("c-k"), num("c-t")),
  );
  plot($("conc-plot"), r.t, [{ values: r.chebyshev_threshold }, { values: r.hoeffding_tail }], { logY: true });
  legend($("conc-legend"), ["Chebyshev deviation (log10)", "Hoeffding tail bound (log10)"]);
  status.textContent = `Chebyshev tail probability at k std devs: ${r.chebyshev_tail.toFixed(4)}`;
});

$("run-budget").onclick = guarded("budget-status", (status) => {
  const r = JSON.parse(
    variance_budget(num("b-s2"), num("b-n"), num("b-pop"), num("b-fv"), num("b-k"), num("b-t")),
  );
  plot($("budget-plot"), r.t, [{ values: r.total_per_t }], { logY: true });
  status.textContent =
    `SRS component ${r.srs_component.toExponential(3)}, k-fold component ${r.kfcv_component.toExponential(3)}`;
});

await init();
