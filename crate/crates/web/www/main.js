import init, { random_level, Evolver } from "./pkg/levelgan_web.js";

const SCALE = 4;
const $ = (id) => document.getElementById(id);

function paint(canvas, view) {
  canvas.width = view.width;
  canvas.height = view.height;
  const data = new Uint8ClampedArray(view.pixels());
  canvas.getContext("2d").putImageData(new ImageData(data, view.width, view.height), 0, 0);
}

function describe(view) {
  const path = view.path_length < 0 ? "unreachable" : `${view.path_length} steps`;
  const novelty = Number.isNaN(view.novelty) ? "n/a" : view.novelty.toFixed(3);
  return `${view.segments} screens, path ${path}, connectivity ${view.connectivity.toFixed(3)}, novelty ${novelty}`;
}

function plot(canvas, history) {
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = "#000";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  const max = Math.max(1, ...history);
  ctx.strokeStyle = "#50ffff";
  ctx.beginPath();
  history.forEach((v, i) => {
    const x = (i / Math.max(1, history.length - 1)) * (canvas.width - 1);
    const y = canvas.height - 1 - (Math.max(0, v) / max) * (canvas.height - 1);
    i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function draw() {
  const view = random_level(Number($("seed").value) >>> 0, $("multigan").checked, SCALE);
  paint($("level"), view);
  $("level-stats").textContent = describe(view);
  view.free();
}

let evolver = null;

function showEvolution() {
  const view = evolver.champion(SCALE);
  paint($("champion"), view);
  $("evo-stats").textContent = `generation ${evolver.generation}: champion ${describe(view)}`;
  plot($("curve"), Array.from(evolver.history()));
  view.free();
}

await init();
$("draw").onclick = draw;
$("start").onclick = () => {
  if (evolver) evolver.free();
  try {
    evolver = new Evolver(Number($("seed").value) >>> 0, Number($("mu").value), Number($("lambda").value),
      $("multigan").checked);
  } catch (e) {
    $("evo-stats").textContent = String(e);
    $("step").disabled = true;
    return;
  }
  $("step").disabled = false;
  showEvolution();
};
$("step").onclick = () => {
  evolver.step(10);
  showEvolution();
};
draw();
