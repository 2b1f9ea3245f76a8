// Browser pad UI: a virtual hopscotch court driving the live engine
// over its WebSocket.  The engine is authoritative for mode and gain;
// the UI only reflects state broadcasts.

import {
  ClientMessage,
  MODES,
  Mode,
  isClientMessage,
  modeMessage,
  parseServerEvent,
  pressMessage,
  releaseMessage,
} from "./protocol.js";
import { COURT_ROWS, padForKey } from "./layout.js";

const params = new URLSearchParams(window.location.search);
const engineUrl =
  params.get("engine") ?? `ws://${window.location.hostname || "127.0.0.1"}:8080`;

const FEED_LIMIT = 50;

let socket: WebSocket | null = null;
let connected = false;
let reconnectDelayMs = 500;

const padButtons = new Map<number, HTMLButtonElement>();
const modeButtons = new Map<Mode, HTMLButtonElement>();
const heldPads = new Set<number>();

const banner = document.getElementById("banner") as HTMLElement;
const feed = document.getElementById("feed") as HTMLElement;
const court = document.getElementById("court") as HTMLElement;
const modeBar = document.getElementById("modes") as HTMLElement;

function send(message: ClientMessage): void {
  if (!connected || !socket) {
    banner.classList.add("flash");
    setTimeout(() => banner.classList.remove("flash"), 200);
    return;
  }
  if (!isClientMessage(message)) throw new Error("outbound message failed validation");
  socket.send(JSON.stringify(message));
}

function setConnected(ok: boolean): void {
  connected = ok;
  banner.textContent = ok ? `connected to ${engineUrl}` : `disconnected — retrying ${engineUrl}`;
  banner.className = ok ? "banner ok" : "banner down";
}

function showMode(mode: Mode): void {
  for (const [m, button] of modeButtons) {
    button.classList.toggle("active", m === mode);
  }
}

function addFeedLine(text: string): void {
  const line = document.createElement("div");
  line.textContent = text;
  feed.prepend(line);
  while (feed.childElementCount > FEED_LIMIT) {
    feed.lastElementChild?.remove();
  }
}

function flashPad(pad: number): void {
  const button = padButtons.get(pad);
  if (!button) return;
  button.classList.add("sounding");
  setTimeout(() => button.classList.remove("sounding"), 150);
}

function connect(): void {
  socket = new WebSocket(engineUrl);
  socket.onopen = () => {
    setConnected(true);
    reconnectDelayMs = 500;
  };
  socket.onclose = () => {
    setConnected(false);
    setTimeout(connect, reconnectDelayMs);
    reconnectDelayMs = Math.min(reconnectDelayMs * 2, 8000);
  };
  socket.onerror = () => socket?.close();
  socket.onmessage = (event) => {
    const msg = parseServerEvent(String(event.data));
    if (!msg) return;
    if (msg.type === "state") {
      showMode(msg.mode);
    } else {
      const pitch = msg.pitch !== undefined ? ` pitch ${msg.pitch}` : "";
      addFeedLine(
        `${(msg.tMs / 1000).toFixed(2)}s  ${msg.soundId}${pitch}  gain ${msg.gain.toFixed(2)}`,
      );
      flashPad(msg.pad);
    }
  };
}

function pressPad(pad: number): void {
  if (heldPads.has(pad)) return;
  heldPads.add(pad);
  padButtons.get(pad)?.classList.add("held");
  send(pressMessage(pad));
}

function releasePad(pad: number): void {
  if (!heldPads.has(pad)) return;
  heldPads.delete(pad);
  padButtons.get(pad)?.classList.remove("held");
  send(releaseMessage(pad));
}

function buildCourt(): void {
  for (const row of COURT_ROWS) {
    const rowEl = document.createElement("div");
    rowEl.className = "row";
    for (const pad of row) {
      const button = document.createElement("button");
      button.className = "pad";
      button.textContent = String(pad);
      button.addEventListener("pointerdown", () => pressPad(pad));
      button.addEventListener("pointerup", () => releasePad(pad));
      button.addEventListener("pointerleave", () => releasePad(pad));
      padButtons.set(pad, button);
      rowEl.appendChild(button);
    }
    court.appendChild(rowEl);
  }
}

function buildModeBar(): void {
  for (const mode of MODES) {
    const button = document.createElement("button");
    button.className = "mode";
    button.textContent = mode;
    button.addEventListener("click", () => send(modeMessage(mode)));
    modeButtons.set(mode, button);
    modeBar.appendChild(button);
  }
}

window.addEventListener("keydown", (event) => {
  if (event.repeat) return;
  const pad = padForKey(event.key);
  if (pad !== null) pressPad(pad);
});

window.addEventListener("keyup", (event) => {
  const pad = padForKey(event.key);
  if (pad !== null) releasePad(pad);
});

buildCourt();
buildModeBar();
setConnected(false);
connect();
