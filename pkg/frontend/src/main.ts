/** Browser bootstrap: wires the DOM to the studio controller. */

import { StudioApi } from "./api.js";
import { canvasCoords, paintGrid } from "./render.js";
import { StudioController } from "./studio.js";
import { createToaster } from "./toast.js";

const SCALE = 3;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function saveFile(name: string, bytes: Uint8Array): void {
  // Rebind to a plain ArrayBuffer so the bytes satisfy BlobPart.
  const copy = new Uint8Array(bytes.length);
  copy.set(bytes);
  const blob = new Blob([copy], { type: "image/png" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(url);
}

function main(): void {
  const canvas = byId<HTMLCanvasElement>("pad");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d canvas unsupported");
  const grayImg = byId<HTMLImageElement>("gray-panel");
  const colorImg = byId<HTMLImageElement>("color-panel");
  const galleryDiv = byId<HTMLDivElement>("gallery");
  const statusLine = byId<HTMLSpanElement>("status");
  const toaster = createToaster(byId<HTMLDivElement>("toasts"));

  const params = new URLSearchParams(window.location.search);
  const serverInput = byId<HTMLInputElement>("server-url");
  serverInput.value = params.get("server") ?? "";

  let api = new StudioApi(serverInput.value, (url, init) => fetch(url, init));

  const studio = new StudioController({
    api: {
      references: () => api.references(),
      synthesize: (sketch, ref) => api.synthesize(sketch, ref),
    },
    notices: toaster,
    saveFile,
    onChange: render,
  });

  canvas.width = studio.canvasSize * SCALE;
  canvas.height = studio.canvasSize * SCALE;

  function render(): void {
    paintGrid(ctx!, studio.displayGrid(), SCALE);
    const result = studio.lastResult;
    if (result) {
      grayImg.src = `data:image/png;base64,${result.grayscale}`;
      colorImg.src = `data:image/png;base64,${result.color}`;
    }
    grayImg.classList.toggle("empty", !result);
    colorImg.classList.toggle("empty", !result);
    renderGallery();
    byId<HTMLButtonElement>("undo").disabled =
      studio.strokes.length === 0 && !studio.liveStroke;
    byId<HTMLButtonElement>("busy-dot").classList.toggle(
      "busy",
      studio.requestInFlight,
    );
  }

  function renderGallery(): void {
    galleryDiv.innerHTML = "";
    galleryDiv.classList.toggle("disabled", !studio.galleryAvailable);
    for (const tile of studio.galleryTiles()) {
      const cell = document.createElement("button");
      cell.className = "tile" + (tile.selected ? " selected" : "");
      cell.disabled = !studio.galleryAvailable && tile.id !== null;
      if (tile.thumbnail === null) {
        cell.textContent = "none";
      } else {
        const img = document.createElement("img");
        // The thumbnail bytes are used exactly as the service sent them.
        img.src = `data:image/png;base64,${tile.thumbnail}`;
        cell.appendChild(img);
      }
      cell.addEventListener("click", () => studio.selectReference(tile.id));
      galleryDiv.appendChild(cell);
    }
  }

  function pointerPos(ev: PointerEvent): { x: number; y: number } {
    const rect = canvas.getBoundingClientRect();
    return canvasCoords(ev.clientX, ev.clientY, rect, studio.canvasSize);
  }

  canvas.addEventListener("pointerdown", (ev) => {
    canvas.setPointerCapture(ev.pointerId);
    const { x, y } = pointerPos(ev);
    studio.pointerDown(x, y);
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (ev.buttons === 0) return;
    const { x, y } = pointerPos(ev);
    studio.pointerMove(x, y);
  });
  const finish = () => studio.pointerUp();
  canvas.addEventListener("pointerup", finish);
  canvas.addEventListener("pointercancel", finish);

  byId<HTMLButtonElement>("undo").addEventListener("click", () => studio.undo());
  byId<HTMLButtonElement>("clear").addEventListener("click", () => studio.clear());
  byId<HTMLButtonElement>("download").addEventListener("click", () =>
    studio.downloadPair(),
  );

  async function connect(): Promise<void> {
    api = new StudioApi(serverInput.value, (url, init) => fetch(url, init));
    statusLine.textContent = "connecting…";
    try {
      const health = await api.health();
      statusLine.textContent = `model ${health.modelVersion}`;
    } catch (err) {
      statusLine.textContent = "service unreachable";
      toaster.notify(err instanceof Error ? err.message : String(err));
    }
    await studio.loadGallery();
  }
  byId<HTMLButtonElement>("connect").addEventListener("click", () => {
    void connect();
  });

  render();
  void connect();
}

main();
