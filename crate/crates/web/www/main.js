// Built by `wasm-bindgen --target web --out-dir www/pkg`; see the README.
import init, { classify, g_field, probe_trace } from "./pkg/flrw_web.js";

const $ = (id) => document.getElementById(id);

function spec() {
  return [parseInt($("k").value, 10), $("a").value, $("lo").value, $("hi").value];
}

function showError(el, e) {
  el.innerHTML = "";
  const div = document.createElement("div");
  div.className = "err";
  div.textContent = String(e);
  el.appendChild(div);
}

function runClassify() {
  const out = $("classify-out");
  try {
    const report = JSON.parse(classify(...spec()));
    const rows = report.verdicts.map((v) => {
      const failing = v.hypotheses
        .filter((h) => h.status !== "holds" && h.status !== "sampled-only")
        .map((h) => `${h.name}: ${h.status}`)
        .join("; ");
      return `<tr><td>${v.id}</td><td class="${v.conclusion}">${v.conclusion}</td><td>${v.text ?? ""}</td><td>${failing}</td></tr>`;
    });
    out.innerHTML =
      `<table><tr><th>statement</th><th>verdict</th><th>conclusion</th><th>unmet hypotheses</th></tr>${rows.join("")}</table>` +
      `<pre>${report.table_row}</pre>`;
  } catch (e) {
    showError(out, e);
  }
}

function drawField() {
  const canvas = $("field-canvas");
  const ctx = canvas.getContext("2d");
  $("field-err").textContent = "";
  let data;
  try {
    const n = 96;
    data = JSON.parse(
      g_field(...spec(), +$("t0").value, +$("t1").value, +$("r0").value, +$("r1").value, n),
    );
  } catch (e) {
    $("field-err").textContent = String(e);
    return;
  }
  const nt = data.t.length, nr = data.r.length;
  const w = canvas.width / nr, h = canvas.height / nt;
  for (let i = 0; i < nt; i++) {
    for (let j = 0; j < nr; j++) {
      const g = data.G[i][j];
      if (g === null) {
        ctx.fillStyle = "#999";
      } else {
        const s = Math.min(1, Math.abs(Math.log10(Math.abs(g) + 1e-300)) / 3);
        const l = 90 - 55 * s;
        ctx.fillStyle = g > 0 ? `hsl(215 70% ${l}%)` : `hsl(0 70% ${l}%)`;
      }
      // t increases upward
      ctx.fillRect(j * w, canvas.height - (i + 1) * h, Math.ceil(w), Math.ceil(h));
    }
  }
  ctx.fillStyle = "#000";
  ctx.fillText(`r = ${data.r[0]} … ${data.r[nr - 1]} →`, 6, canvas.height - 6);
  ctx.fillText(`t = ${data.t[nt - 1]} ↑`, 6, 12);
}

function plotProbe(samples) {
  const canvas = $("probe-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pts = samples.filter((s) => s.t > 0);
  if (pts.length < 2) return;
  const xs = pts.map((s) => Math.log10(s.t));
  const clip = (v) => Math.max(-2, Math.min(2, v));
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const X = (x) => 30 + ((x - x0) / (x1 - x0 || 1)) * (canvas.width - 40);
  const Y = (y) => canvas.height / 2 - (clip(y) / 2) * (canvas.height / 2 - 10);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(30, Y(0));
  ctx.lineTo(canvas.width - 10, Y(0));
  ctx.stroke();
  for (const [key, colour] of [["g", "#1f5fbf"], ["c", "#c0392b"]]) {
    ctx.strokeStyle = colour;
    ctx.beginPath();
    pts.forEach((s, k) => (k ? ctx.lineTo : ctx.moveTo).call(ctx, X(xs[k]), Y(s[key])));
    ctx.stroke();
  }
  ctx.fillStyle = "#000";
  ctx.fillText("log₁₀ t →", canvas.width - 70, canvas.height - 6);
  ctx.fillStyle = "#1f5fbf";
  ctx.fillText("G", 8, 14);
  ctx.fillStyle = "#c0392b";
  ctx.fillText("C", 20, 14);
}

function runProbe() {
  const out = $("probe-out");
  try {
    const r = JSON.parse(probe_trace(...spec(), +$("pr0").value, +$("ptheta").value, +$("peps").value));
    plotProbe(r.samples);
    const kind = (d) => d.kind.kind + (d.kind.value !== undefined ? ` (${d.kind.value})` : "");
    const w = r.witness.outcome;
    out.innerHTML =
      `<p>lim R: ${kind(r.limits.R)}; lim G: ${kind(r.limits.G)}; lim C: ${kind(r.limits.C)}; ` +
      `lim r²a'²: ${kind(r.limits.r2_aprime2)}</p>` +
      `<p>witness: ${w.kind === "Witness" ? `t = ${w.t.toPrecision(6)}, G = ${w.g.toExponential(2)}, C = ${w.c.toExponential(2)}` : "none"}` +
      ` (${r.witness.note})</p>`;
  } catch (e) {
    showError(out, e);
  }
}

await init();
$("preset").addEventListener("change", (ev) => {
  if (!ev.target.value) return;
  const [k, a, lo, hi] = ev.target.value.split("|");
  $("k").value = k;
  $("a").value = a;
  $("lo").value = lo;
  $("hi").value = hi;
});
$("classify").addEventListener("click", runClassify);
$("field").addEventListener("click", drawField);
$("probe").addEventListener("click", runProbe);
runClassify();
drawField();
