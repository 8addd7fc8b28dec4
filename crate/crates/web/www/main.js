import init, { layouts, patternMap, groupRates, reliabilityCurves } from "./pkg/hamsim_browser.js";

const $ = (id) => document.getElementById(id);
const COLORS = { dc: "#2a9d8f", dnc: "#e9c46a", nd: "#e76f51" };
const LINE_COLORS = ["#264653", "#8ab17d", "#e76f51", "#f4a261", "#6d597a"];
const pct = (x) => x.toFixed(1);

function guard(fn) {
  return () => {
    try {
      $("error").textContent = "";
      fn();
    } catch (e) {
      $("error").textContent = String(e);
    }
  };
}

function fillLayouts(select, views, selected) {
  for (const v of views) {
    const o = document.createElement("option");
    o.value = o.textContent = v.name;
    o.selected = v.name === selected;
    select.append(o);
  }
}

function drawMap(views) {
  const name = $("map-layout").value;
  const view = views.find((v) => v.name === name);
  const data = JSON.parse(patternMap(name, Number($("map-pattern").value), $("map-policy").value));
  const ctx = $("map").getContext("2d");
  const size = 24, top = 20;
  ctx.clearRect(0, 0, 800, 260);
  for (let c = 0; c < data.cols; c++) {
    const owner = view.owners[c];
    ctx.fillStyle = owner === null ? "#999" : owner % 2 ? "#bcd" : "#89a";
    ctx.fillRect(c * size + 1, 2, size - 2, top - 6);
  }
  for (let r = 0; r < data.rows; r++) {
    for (let c = 0; c < data.cols; c++) {
      const cell = data.cells[r * data.cols + c];
      const total = cell.dc + cell.dnc + cell.nd;
      const x = c * size, y = top + r * size;
      if (total === 0) {
        ctx.fillStyle = "#f4f4f4";
        ctx.fillRect(x + 1, y + 1, size - 2, size - 2);
        continue;
      }
      let h0 = 0;
      for (const k of ["dc", "dnc", "nd"]) {
        const h = ((size - 2) * cell[k]) / total;
        ctx.fillStyle = COLORS[k];
        ctx.fillRect(x + 1, y + 1 + h0, size - 2, h);
        h0 += h;
      }
    }
  }
  const r = data.rates;
  $("map-rates").textContent =
    `pattern ${data.pattern} on ${data.layout}: DC ${pct(r.dc)}%  DNC ${pct(r.dnc)}%  ND ${pct(r.nd)}%`;
}

function drawGroups() {
  const rows = JSON.parse(groupRates($("grp-counting").value, $("grp-policy").value));
  const t = $("groups");
  t.innerHTML = "<tr><th>layout</th><th>group</th><th>DC %</th><th>DNC %</th><th>ND %</th></tr>";
  for (const row of rows) {
    const tr = document.createElement("tr");
    for (const v of [row.layout, row.group, pct(row.rates.dc), pct(row.rates.dnc), pct(row.rates.nd)]) {
      const td = document.createElement("td");
      td.textContent = v;
      tr.append(td);
    }
    t.append(tr);
  }
}

function drawCurves() {
  const data = JSON.parse(
    reliabilityCurves(
      $("rel-layout").value,
      Number($("rel-t").value),
      Number($("rel-r").value),
      Number($("rel-max").value),
      Number($("rel-words").value),
    ),
  );
  const ctx = $("curves").getContext("2d");
  const W = 800, H = 360, pad = 40;
  ctx.clearRect(0, 0, W, H);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, 10, W - pad - 10, H - pad - 10);
  const tMax = data.curves[0].points.at(-1)[0];
  const px = (t) => pad + ((W - pad - 10) * t) / tMax;
  const py = (r) => 10 + (H - pad - 10) * (1 - r);
  ctx.fillStyle = "#333";
  ctx.fillText("1", pad - 12, py(1) + 4);
  ctx.fillText("0", pad - 12, py(0) + 4);
  ctx.fillText(String(tMax), W - 40, H - 15);
  data.curves.forEach((curve, i) => {
    ctx.strokeStyle = LINE_COLORS[i % LINE_COLORS.length];
    ctx.beginPath();
    curve.points.forEach(([t, r], k) => (k ? ctx.lineTo(px(t), py(r)) : ctx.moveTo(px(t), py(r))));
    ctx.stroke();
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(curve.layout, W - 120, 30 + 16 * i);
  });
  $("rel-lambda").textContent = `calibrated fault rate: ${data.lambda.toExponential(4)} per bit per unit time`;
}

await init();
const views = JSON.parse(layouts());
fillLayouts($("map-layout"), views, "Ham7,4,A");
fillLayouts($("rel-layout"), views, "Ham31,26");

const map = guard(() => drawMap(views));
const groups = guard(drawGroups);
const curves = guard(drawCurves);
for (const id of ["map-layout", "map-pattern", "map-policy"]) $(id).addEventListener("change", map);
for (const id of ["grp-counting", "grp-policy"]) $(id).addEventListener("change", groups);
for (const id of ["rel-layout", "rel-t", "rel-r", "rel-words", "rel-max"]) $(id).addEventListener("change", curves);
map();
groups();
curves();
