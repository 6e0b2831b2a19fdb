import init, { sample, forest_law, analyze } from "./pkg/polya_demo.js";

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";

function el(name, attrs, parent) {
  const e = document.createElementNS(SVG, name);
  for (const [k, v] of Object.entries(attrs)) e.setAttribute(k, v);
  parent.appendChild(e);
  return e;
}

function run(out, f) {
  try {
    f();
  } catch (e) {
    out.innerHTML = `<p class="error">${e.message ?? e}</p>`;
  }
}

// Tidy layout: leaves get consecutive x slots, parents sit over their children.
function layout(parents) {
  const n = parents.length;
  const kids = Array.from({ length: n }, () => []);
  parents.forEach((p, v) => { if (p !== null) kids[p].push(v); });
  const x = new Array(n), depth = new Array(n).fill(0);
  let next = 0;
  for (let v = 0; v < n; v++) if (parents[v] !== null) depth[v] = depth[parents[v]] + 1;
  const place = [[0, false]];
  while (place.length) {
    const [v, done] = place.pop();
    if (kids[v].length === 0) { x[v] = next++; continue; }
    if (done) { x[v] = (x[kids[v][0]] + x[kids[v][kids[v].length - 1]]) / 2; continue; }
    place.push([v, true]);
    for (let i = kids[v].length - 1; i >= 0; i--) place.push([kids[v][i], false]);
  }
  return { x, depth, width: Math.max(next, 1), height: Math.max(...depth) + 1 };
}

function drawTree(d) {
  const svg = $("tree");
  svg.innerHTML = "";
  const { x, depth, width, height } = layout(d.parents);
  const w = svg.clientWidth || 900, h = 360, pad = 12;
  const sx = (w - 2 * pad) / Math.max(width - 1, 1), sy = (h - 2 * pad) / Math.max(height - 1, 1);
  const px = (v) => pad + x[v] * sx, py = (v) => pad + depth[v] * sy;
  d.parents.forEach((p, v) => {
    if (p !== null) el("line", { x1: px(p), y1: py(p), x2: px(v), y2: py(v), class: "edge" }, svg);
  });
  const r = Math.max(1.5, Math.min(5, sx / 2.5));
  d.parents.forEach((_, v) => {
    el("circle", { cx: px(v), cy: py(v), r, class: d.c_mask[v] ? "c" : "d" }, svg);
  });
}

function doSample() {
  run($("sample-info"), () => {
    const d = JSON.parse(sample(Number($("n").value), $("seed").value));
    const n = d.parents.length;
    $("sample-info").innerHTML =
      `C-tree size ${d.c_size} of ${n} (${(d.c_size / n).toFixed(3)}), ` +
      `largest D-forest ${d.max_forest}, seed ${d.seed}<br><code>${d.tree}</code>`;
    drawTree(d);
  });
}

function bars(values, cls, width = 300) {
  const max = Math.max(...values, 1e-12);
  return values.map((v) => `<svg width="${width}" height="12"><rect class="${cls}" width="${(width * v) / max}" height="12"></rect></svg>`);
}

function doLaw() {
  run($("law-out"), () => {
    const d = JSON.parse(forest_law(Number($("max-m").value)));
    const b = bars(d.rows.map((r) => r.eq), "bar");
    const rows = d.rows.map((r, i) =>
      `<tr><td>${r.m}</td><td>${r.eq.toFixed(4)}</td><td>${r.ge.toFixed(4)}</td><td>${b[i]}</td></tr>`).join("");
    $("law-out").innerHTML =
      `<p>rho = ${d.rho.toFixed(12)}, b = ${d.b.toFixed(12)}</p>` +
      `<table><tr><th>m</th><th>P(= m)</th><th>P(&ge; m)</th><th></th></tr>${rows}</table>`;
  });
}

function doAnalyze() {
  run($("analyze-out"), () => {
    const d = JSON.parse(analyze($("parens").value));
    const tb = bars(d.tree_law.map((r) => r.p), "bar", 200);
    const sb = bars(d.size_law.slice(1), "bar2", 200);
    const rows = d.tree_law.map((r, i) =>
      `<tr><td>${r.k}</td><td>${r.exact}</td><td>${tb[i]}</td><td>${d.size_law[r.k].toFixed(4)}</td><td>${sb[i]}</td></tr>`).join("");
    $("analyze-out").innerHTML =
      `<p>size ${d.size}, |Aut| = ${d.aut_order}, ${d.orbits} node orbits<br>` +
      `fixed-point polynomial <code>${d.polynomial}</code></p>` +
      `<table><tr><th>k</th><th>P(k fixed) for this tree</th><th></th><th>all trees of this size</th><th></th></tr>${rows}</table>`;
  });
}

await init();
$("sample").onclick = doSample;
$("reseed").onclick = () => {
  $("seed").value = "0x" + Math.floor(Math.random() * 2 ** 32).toString(16).toUpperCase();
  doSample();
};
$("law").onclick = doLaw;
$("analyze").onclick = doAnalyze;
doSample();
doLaw();
doAnalyze();
