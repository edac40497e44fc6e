import { StripChart } from "./chart";
import { InputLoop } from "./input";
import { defaultViewport } from "./mapping";
import { ControlPanel } from "./panel";
import { SceneView } from "./scene";
import { PlaygroundSocket } from "./socket";
import { applyServerMessage, initialUiState, type UiState } from "./state";

function canvasContext(id: string): CanvasRenderingContext2D {
  const canvas = document.getElementById(id) as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error(`no 2d context for #${id}`);
  return ctx;
}

function main(): void {
  const sceneCanvas = document.getElementById("scene") as HTMLCanvasElement;
  const chartCanvas = document.getElementById("chart") as HTMLCanvasElement;
  const panelRoot = document.getElementById("panel")!;

  const view = defaultViewport(sceneCanvas.width, sceneCanvas.height);
  const scene = new SceneView(canvasContext("scene"), view);
  const chart = new StripChart(canvasContext("chart"), chartCanvas.width, chartCanvas.height);

  let state: UiState = initialUiState();
  let connected = false;

  const url = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
  const socket = new PlaygroundSocket(url);
  const panel = new ControlPanel(panelRoot, (msg) => socket.send(msg));
  const input = new InputLoop(view, (msg) => socket.send(msg));

  socket.onMessage = (msg) => {
    state = applyServerMessage(state, msg);
  };
  socket.onSessionStart = () => {
    connected = true;
    state = initialUiState();
    input.stop();
    input.start();
  };
  socket.onDisconnect = () => {
    connected = false;
    input.stop();
  };
  socket.connect();

  sceneCanvas.addEventListener("pointermove", (event) => {
    const rect = sceneCanvas.getBoundingClientRect();
    input.pointerMoved(event.clientX - rect.left, event.clientY - rect.top);
  });
  sceneCanvas.addEventListener(
    "wheel",
    (event) => {
      event.preventDefault();
      input.wheelTurned(event.deltaY);
    },
    { passive: false },
  );
  window.addEventListener("keydown", (event) => input.keyPressed(event.key));

  const frame = () => {
    scene.draw(state, input.handPosition, input.yaw);
    chart.draw(state);
    panel.render(state, connected);
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

main();
