/** Browser app: wires pointer input, the control panel, and the
 * protocol client together. All molecular state lives engine-side;
 * after every successful command the listing is refetched and the
 * scene rebuilt from scratch.
 */

import * as THREE from "three";

import { dragPlanePoint } from "./dragplane.js";
import { cameraPosition, defaultOrbit, orbitBy, panBy, viewDirection, zoomBy } from "./orbit.js";
import type { Ray } from "./pick.js";
import { pick } from "./pick.js";
import { ProtocolClient, ProtocolError, WebSocketTransport } from "./protocol.js";
import { SceneRenderer } from "./render.js";
import type { SceneState } from "./scene.js";
import { applyEvent, applyListing, initialState, renderModel } from "./scene.js";
import type { EventMessage, Vec3 } from "./types.js";

type Tool = "grab" | "delete" | "anchor";

const canvas = document.getElementById("viewport") as HTMLCanvasElement;
const labelLayer = document.getElementById("labels") as HTMLElement;
const toastLayer = document.getElementById("toasts") as HTMLElement;
const statusLine = document.getElementById("status") as HTMLElement;

const renderer = new SceneRenderer(canvas, labelLayer);
let orbit = defaultOrbit();
let state: SceneState = initialState();
let tool: Tool = "grab";

let grabbedAtom: number | null = null;
let dragPlaneOrigin: Vec3 | null = null;
let dragInFlight = false;
let queuedDragPoint: Vec3 | null = null;

function toast(text: string): void {
  const node = document.createElement("div");
  node.className = "toast";
  node.textContent = text;
  toastLayer.appendChild(node);
  setTimeout(() => node.remove(), 3200);
}

function redraw(): void {
  renderer.setModel(renderModel(state));
}

function syncCamera(): void {
  const position = cameraPosition(orbit);
  renderer.camera.position.set(position.x, position.y, position.z);
  renderer.camera.lookAt(orbit.target.x, orbit.target.y, orbit.target.z);
}

const url = `ws://${location.host}/ws`;
const transport = new WebSocketTransport(url);
const client = new ProtocolClient(transport);

client.onEvent((event: EventMessage) => {
  state = applyEvent(state, event);
  if (event.event === "relax_done") {
    void refresh();
    return;
  }
  redraw();
});

async function refresh(): Promise<void> {
  state = applyListing(state, await client.list());
  redraw();
}

async function run(cmd: string, args: Record<string, unknown> = {}): Promise<boolean> {
  try {
    await client.call(cmd, args);
    await refresh();
    return true;
  } catch (error) {
    if (error instanceof ProtocolError) {
      toast(`${error.code}: ${error.message}`);
    } else {
      toast(String(error));
    }
    return false;
  }
}

// -- pointer handling ---------------------------------------------------------

function pointerRay(event: PointerEvent): Ray {
  const rect = canvas.getBoundingClientRect();
  const ndc = new THREE.Vector3(
    ((event.clientX - rect.left) / rect.width) * 2 - 1,
    -((event.clientY - rect.top) / rect.height) * 2 + 1,
    0.5
  );
  ndc.unproject(renderer.camera);
  const origin = renderer.camera.position;
  return {
    origin: { x: origin.x, y: origin.y, z: origin.z },
    direction: { x: ndc.x - origin.x, y: ndc.y - origin.y, z: ndc.z - origin.z },
  };
}

function pickAtom(event: PointerEvent): number | null {
  const spheres = state.listing.atoms.map((atom) => ({
    id: atom.id,
    center: { x: atom.x, y: atom.y, z: atom.z },
    radius: atom.radius,
  }));
  return pick(pointerRay(event), spheres);
}

async function sendDrag(point: Vec3): Promise<void> {
  if (dragInFlight) {
    queuedDragPoint = point;
    return;
  }
  dragInFlight = true;
  try {
    await client.call("drag", { x: point.x, y: point.y, z: point.z });
    await refresh();
  } catch (error) {
    if (error instanceof ProtocolError) {
      toast(`${error.code}: ${error.message}`);
    }
  } finally {
    dragInFlight = false;
    if (queuedDragPoint !== null) {
      const next = queuedDragPoint;
      queuedDragPoint = null;
      void sendDrag(next);
    }
  }
}

canvas.addEventListener("contextmenu", (event) => event.preventDefault());

canvas.addEventListener("pointerdown", (event) => {
  if (event.button === 0) {
    const atom = pickAtom(event);
    if (atom === null) {
      return;
    }
    if (tool === "delete") {
      void run("delete_atom", { atom });
      return;
    }
    if (tool === "anchor") {
      const next = state.listing.anchor === atom ? null : atom;
      void run("set_anchor", { atom: next });
      return;
    }
    canvas.setPointerCapture(event.pointerId);
    void (async () => {
      if (await run("grab", { atom })) {
        grabbedAtom = atom;
        const listed = state.listing.atoms.find((a) => a.id === atom);
        dragPlaneOrigin = listed ? { x: listed.x, y: listed.y, z: listed.z } : null;
      }
    })();
  }
});

canvas.addEventListener("pointermove", (event) => {
  if (event.buttons & 2) {
    orbit = orbitBy(orbit, -event.movementX * 0.006, -event.movementY * 0.006);
    syncCamera();
    return;
  }
  if (event.buttons & 4) {
    orbit = panBy(orbit, -event.movementX * 0.02, event.movementY * 0.02);
    syncCamera();
    return;
  }
  if (grabbedAtom !== null && dragPlaneOrigin !== null && event.buttons & 1) {
    const point = dragPlanePoint(pointerRay(event), dragPlaneOrigin, viewDirection(orbit));
    if (point !== null) {
      void sendDrag(point);
    }
  }
});

canvas.addEventListener("pointerup", (event) => {
  if (event.button === 0 && grabbedAtom !== null) {
    grabbedAtom = null;
    dragPlaneOrigin = null;
    queuedDragPoint = null;
    void run("release");
  }
});

canvas.addEventListener("wheel", (event) => {
  event.preventDefault();
  orbit = zoomBy(orbit, Math.exp(event.deltaY * 0.001));
  syncCamera();
});

// -- control panel ----------------------------------------------------------------

for (const symbol of ["C", "H", "O", "N"]) {
  const button = document.getElementById(`create-${symbol}`);
  button?.addEventListener("click", () => {
    const jitter = () => (Math.random() - 0.5) * 1.5;
    void run("create_atom", {
      element: symbol,
      x: orbit.target.x + jitter(),
      y: orbit.target.y + jitter(),
      z: orbit.target.z + jitter(),
    });
  });
}

for (const mode of ["grab", "delete", "anchor"] as const) {
  const button = document.getElementById(`tool-${mode}`);
  button?.addEventListener("click", () => {
    tool = mode;
    for (const other of ["grab", "delete", "anchor"]) {
      document.getElementById(`tool-${other}`)?.classList.toggle("active", other === mode);
    }
  });
}

document.getElementById("relax")?.addEventListener("click", () => {
  void run("relax");
});

document.getElementById("save")?.addEventListener("click", () => {
  void (async () => {
    try {
      const exchange = await client.call("snapshot");
      const xml = (exchange.response.result as { xml: string }).xml;
      const blob = new Blob([xml], { type: "application/xml" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = "molecule.xml";
      link.click();
      URL.revokeObjectURL(link.href);
    } catch (error) {
      if (error instanceof ProtocolError) {
        toast(`${error.code}: ${error.message}`);
      }
    }
  })();
});

const filePicker = document.getElementById("load-file") as HTMLInputElement | null;
document.getElementById("load")?.addEventListener("click", () => filePicker?.click());
filePicker?.addEventListener("change", () => {
  const file = filePicker.files?.[0];
  if (!file) {
    return;
  }
  void (async () => {
    const xml = await file.text();
    await run("load_snapshot", { xml });
    filePicker.value = "";
  })();
});

// -- boot ----------------------------------------------------------------------------

function animate(timeMs: number): void {
  renderer.frame(timeMs);
  requestAnimationFrame(animate);
}

window.addEventListener("resize", () => renderer.resize());

void (async () => {
  try {
    await transport.ready();
    statusLine.textContent = "connected";
    await refresh();
  } catch {
    statusLine.textContent = "connection failed; is `molecuforge serve --ui` running?";
  }
  syncCamera();
  renderer.resize();
  requestAnimationFrame(animate);
})();
