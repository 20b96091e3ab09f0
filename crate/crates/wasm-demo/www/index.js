import init, { density_curve, anneal, mass_outside_well } from "./pkg/swarm_anneal_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fail(out, e) {
  out.className = "out err";
  out.textContent = String(e);
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
}

function polyline(ctx, xs, ys, box, color) {
  const [x0, x1, y0, y1, pad, w, h] = box;
  ctx.strokeStyle = color;
  ctx.beginPath();
  xs.forEach((x, i) => {
    const px = pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
    const py = h - pad - ((ys[i] - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
    i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
  });
  ctx.stroke();
}

function plotDensity() {
  const out = $("d-out");
  try {
    const v = density_curve(num("d-m"), num("d-beta"), 801);
    const xs = [], rho = [], gibbs = [];
    for (let i = 0; i < v.length; i += 3) {
      xs.push(v[i]); rho.push(v[i + 1]); gibbs.push(v[i + 2]);
    }
    const c = $("d-canvas"), ctx = c.getContext("2d"), pad = 20;
    const top = Math.max(...rho, ...gibbs);
    axes(ctx, c.width, c.height, pad);
    const box = [-8, 8, 0, top, pad, c.width, c.height];
    polyline(ctx, xs, gibbs, box, "#aaa");
    polyline(ctx, xs, rho, box, "#c33");
    out.className = "out";
    out.textContent = `red: swarm density, grey: Gibbs density; peak ${top.toFixed(3)}`;
  } catch (e) {
    fail(out, e);
  }
}

function runAnneal() {
  const out = $("a-out");
  out.className = "out";
  out.textContent = "running...";
  // let the message paint before the synchronous run
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const r = anneal($("a-method").value, num("a-m"), num("a-rate"), num("a-n"), num("a-runs"), num("a-seed"));
      const ms = performance.now() - t0;
      drawHeatmap(r);
      drawCurve(r);
      out.textContent =
        `${(100 * r.fraction_in_well()).toFixed(1)}% of final particles in [3, 5]; ` +
        `final median min U ${r.curve_u().at(-1).toExponential(2)}; ${ms.toFixed(0)} ms`;
      r.free();
    } catch (e) {
      fail(out, e);
    }
  }, 10);
}

function drawHeatmap(r) {
  const c = $("a-heat"), ctx = c.getContext("2d");
  const tb = r.t_bins(), xb = r.x_bins(), h = r.heatmap();
  const max = Math.max(...h) || 1;
  const cw = c.width / tb, ch = c.height / xb;
  ctx.clearRect(0, 0, c.width, c.height);
  for (let t = 0; t < tb; t++) {
    for (let x = 0; x < xb; x++) {
      const s = Math.sqrt(h[t * xb + x] / max);
      ctx.fillStyle = `rgb(${255 - 200 * s}, ${255 - 230 * s}, ${255 - 120 * s})`;
      // time runs left to right, x bottom to top
      ctx.fillRect(t * cw, c.height - (x + 1) * ch, cw + 0.5, ch + 0.5);
    }
  }
  ctx.strokeStyle = "#c33";
  const y4 = c.height - ((4 + 8) / 16) * c.height;
  ctx.beginPath(); ctx.moveTo(0, y4); ctx.lineTo(c.width, y4); ctx.stroke();
}

function drawCurve(r) {
  const c = $("a-curve"), ctx = c.getContext("2d"), pad = 20;
  const ts = r.curve_t(), us = r.curve_u().map((u) => Math.log10(Math.max(u, 1e-12)));
  axes(ctx, c.width, c.height, pad);
  polyline(ctx, ts, us, [ts[0], ts.at(-1) || 1, Math.min(...us), Math.max(...us), pad, c.width, c.height], "#33c");
}

function tabulate() {
  const out = $("w-out");
  try {
    const m = num("w-m");
    const rows = [0.25, 1, 10, 100, 1000].map((b) => `beta ${String(b).padStart(6)}: ${mass_outside_well(b, m).toExponential(3)}`);
    out.className = "out";
    out.innerHTML = "mass outside [3, 5]<br>" + rows.join("<br>");
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("d-go").onclick = plotDensity;
$("a-go").onclick = runAnneal;
$("w-go").onclick = tabulate;
plotDensity();
