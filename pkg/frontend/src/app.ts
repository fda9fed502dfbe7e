// Browser wiring: drawing canvas, mode switching, probe and region-aggregate
// calls, and stress/normal result panels. This is the only DOM-aware module.

import { ServiceClient, ServiceError } from './api.js';
import { colorizeGray } from './colormap.js';
import { encodeGrayPng, toBase64 } from './png.js';
import { rasterizeStrokes } from './raster.js';
import { CanvasState, type Point, type Stroke } from './state.js';

const SERVICE_URL =
  new URLSearchParams(location.search).get('service') ?? 'http://127.0.0.1:8787';

interface Ui {
  state: CanvasState;
  client: ServiceClient;
  resolution: number;
  scale: number;
  brushWidth: number;
  lastProbe: { x: number; y: number } | null;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function toast(message: string): void {
  const box = el<HTMLDivElement>('toast');
  box.textContent = message;
  box.style.display = 'block';
  window.setTimeout(() => (box.style.display = 'none'), 4000);
}

function redrawSketch(ui: Ui): void {
  const canvas = el<HTMLCanvasElement>('sketch');
  const ctx = canvas.getContext('2d')!;
  const raster = rasterizeStrokes(ui.state.getStrokes(), ui.resolution);
  ctx.imageSmoothingEnabled = false;
  ctx.fillStyle = '#ffffff';
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = '#111111';
  for (let y = 0; y < ui.resolution; y++) {
    for (let x = 0; x < ui.resolution; x++) {
      if (raster[y * ui.resolution + x]) {
        ctx.fillRect(x * ui.scale, y * ui.scale, ui.scale, ui.scale);
      }
    }
  }
  ctx.fillStyle = '#e02020';
  for (const m of ui.state.markers) {
    ctx.beginPath();
    ctx.arc((m.x + 0.5) * ui.scale, (m.y + 0.5) * ui.scale, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  const region = ui.state.region;
  if (region) {
    ctx.strokeStyle = '#e08020';
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc((region.cx + 0.5) * ui.scale, (region.cy + 0.5) * ui.scale, region.radius * ui.scale, 0, 2 * Math.PI);
    ctx.stroke();
  }
}

async function drawPanel(canvasId: string, pngB64: string | null, colorize: boolean): Promise<void> {
  const canvas = el<HTMLCanvasElement>(canvasId);
  const ctx = canvas.getContext('2d')!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!pngB64) return;
  const img = new Image();
  img.src = 'data:image/png;base64,' + pngB64;
  await img.decode();
  const off = document.createElement('canvas');
  off.width = img.width;
  off.height = img.height;
  const octx = off.getContext('2d')!;
  octx.drawImage(img, 0, 0);
  if (colorize) {
    const data = octx.getImageData(0, 0, off.width, off.height);
    const gray = new Uint8Array(off.width * off.height);
    for (let i = 0; i < gray.length; i++) gray[i] = data.data[4 * i];
    colorizeGray(gray, data.data);
    octx.putImageData(data, 0, 0);
  }
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}

function exportSketchB64(ui: Ui): string {
  const raster = rasterizeStrokes(ui.state.getStrokes(), ui.resolution);
  return toBase64(encodeGrayPng(raster, ui.resolution, ui.resolution));
}

async function probe(ui: Ui, x: number, y: number): Promise<void> {
  ui.lastProbe = { x, y };
  ui.state.markers = [{ x, y }];
  ui.state.region = null;
  redrawSketch(ui);
  try {
    const res = await ui.client.infer(exportSketchB64(ui), x, y);
    if (!res) return; // superseded by a newer click
    ui.state.panels = { stress: res.stress, normal: res.normal, mask: res.mask };
    await drawPanel('stress-panel', res.stress, true);
    await drawPanel('normal-panel', res.normal, false);
    el<HTMLSpanElement>('latency').textContent = `${res.latency_ms.toFixed(1)} ms`;
    if (res.warnings.length) toast(res.warnings.join('; '));
  } catch (err) {
    toast(err instanceof ServiceError ? err.detail : String(err));
  }
}

async function aggregateRegion(ui: Ui, cx: number, cy: number, radius: number): Promise<void> {
  ui.state.region = { cx, cy, radius };
  redrawSketch(ui);
  try {
    const res = await ui.client.aggregate(exportSketchB64(ui), { cx, cy, radius });
    if (!res) return;
    ui.state.markers = res.selected_pixels.map(([x, y]) => ({ x, y }));
    redrawSketch(ui);
    await drawPanel('stress-panel', res.aggregated, true);
    el<HTMLSpanElement>('latency').textContent = `${res.per_force_count} forces aggregated`;
    if (res.warnings.length) toast(res.warnings.join('; '));
  } catch (err) {
    toast(err instanceof ServiceError ? err.detail : String(err));
  }
}

function logicalCoords(ui: Ui, canvas: HTMLCanvasElement, ev: PointerEvent): Point {
  const rect = canvas.getBoundingClientRect();
  const x = ((ev.clientX - rect.left) / rect.width) * ui.resolution;
  const y = ((ev.clientY - rect.top) / rect.height) * ui.resolution;
  return [Math.min(ui.resolution - 1, Math.max(0, Math.floor(x))), Math.min(ui.resolution - 1, Math.max(0, Math.floor(y)))];
}

async function boot(): Promise<void> {
  const client = new ServiceClient(SERVICE_URL);
  let resolution = 64;
  try {
    const health = await client.health();
    if (health.checkpoints.length > 0) {
      resolution = health.checkpoints[0].resolution;
    } else {
      toast('service is degraded: no checkpoint loaded');
    }
  } catch {
    toast(`cannot reach service at ${SERVICE_URL}`);
  }
  const canvas = el<HTMLCanvasElement>('sketch');
  const ui: Ui = {
    state: new CanvasState(),
    client,
    resolution,
    scale: canvas.width / resolution,
    brushWidth: 2,
    lastProbe: null,
  };

  let current: Stroke | null = null;
  let dragStart: Point | null = null;

  canvas.addEventListener('pointerdown', (ev) => {
    const p = logicalCoords(ui, canvas, ev);
    if (ui.state.mode === 'sketch') {
      current = { points: [p], width: ui.brushWidth };
    } else {
      dragStart = p;
    }
    canvas.setPointerCapture(ev.pointerId);
  });
  canvas.addEventListener('pointermove', (ev) => {
    if (ui.state.mode === 'sketch' && current) {
      current.points.push(logicalCoords(ui, canvas, ev));
      drawPreview(ui, ui.state.getStrokes().concat([current]));
    }
  });
  canvas.addEventListener('pointerup', (ev) => {
    const p = logicalCoords(ui, canvas, ev);
    if (ui.state.mode === 'sketch' && current) {
      ui.state.addStroke(current);
      current = null;
      redrawSketch(ui);
    } else if (ui.state.mode === 'force' && dragStart) {
      const radius = Math.hypot(p[0] - dragStart[0], p[1] - dragStart[1]);
      if (radius < 2) {
        void probe(ui, dragStart[0], dragStart[1]);
      } else {
        void aggregateRegion(ui, dragStart[0], dragStart[1], radius);
      }
      dragStart = null;
    }
  });

  function drawPreview(u: Ui, strokes: readonly Stroke[]): void {
    const ctx = canvas.getContext('2d')!;
    const raster = rasterizeStrokes(strokes, u.resolution);
    ctx.fillStyle = '#ffffff';
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    ctx.fillStyle = '#111111';
    for (let y = 0; y < u.resolution; y++) {
      for (let x = 0; x < u.resolution; x++) {
        if (raster[y * u.resolution + x]) {
          ctx.fillRect(x * u.scale, y * u.scale, u.scale, u.scale);
        }
      }
    }
  }

  for (const mode of ['sketch', 'force'] as const) {
    el<HTMLInputElement>(`mode-${mode}`).addEventListener('change', () => {
      ui.state.mode = mode;
    });
  }
  el<HTMLButtonElement>('clear').addEventListener('click', () => {
    ui.state.clear();
    redrawSketch(ui);
  });
  el<HTMLButtonElement>('undo').addEventListener('click', () => {
    ui.state.undo();
    redrawSketch(ui);
  });
  el<HTMLButtonElement>('redo').addEventListener('click', () => {
    ui.state.redo();
    redrawSketch(ui);
  });
  el<HTMLButtonElement>('reprobe').addEventListener('click', () => {
    if (ui.lastProbe) void probe(ui, ui.lastProbe.x, ui.lastProbe.y);
  });
  el<HTMLInputElement>('brush').addEventListener('change', (ev) => {
    ui.brushWidth = Number((ev.target as HTMLInputElement).value);
  });
  el<HTMLInputElement>('load-sketch').addEventListener('change', async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (!file) return;
    const img = new Image();
    img.src = URL.createObjectURL(file);
    await img.decode();
    const off = document.createElement('canvas');
    off.width = ui.resolution;
    off.height = ui.resolution;
    const octx = off.getContext('2d')!;
    octx.drawImage(img, 0, 0, ui.resolution, ui.resolution);
    const data = octx.getImageData(0, 0, ui.resolution, ui.resolution);
    // binarize: any sufficiently dark or bright-on-dark pixel becomes a stroke dot
    const dots: Stroke[] = [];
    for (let y = 0; y < ui.resolution; y++) {
      for (let x = 0; x < ui.resolution; x++) {
        const v = data.data[4 * (y * ui.resolution + x)];
        if (v > 127) dots.push({ points: [[x, y]], width: 1 });
      }
    }
    ui.state.addStrokes(dots); // one undo step for the whole import
    redrawSketch(ui);
  });

  redrawSketch(ui);
}

if (typeof document !== 'undefined') {
  void boot();
}
