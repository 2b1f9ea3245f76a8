// Headless socket driver against a real engine process: clicks every
// pad and every mode, then checks the engine's session log against the
// click script record for record.

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { createInterface } from "node:readline";
import WebSocket from "ws";

import {
  ClientMessage,
  Mode,
  isClientMessage,
  isServerEvent,
  modeMessage,
  pressMessage,
  releaseMessage,
} from "../src/protocol.js";

const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..", "..");

let engine: ChildProcess;
let wsPort = 0;
let sessionDir: string;
let sessionPath: string;

function startEngine(): Promise<void> {
  sessionDir = mkdtempSync(join(tmpdir(), "hopscotch-ui-"));
  sessionPath = join(sessionDir, "session.jsonl");
  engine = spawn(
    "python3",
    ["-m", "hopscotch.cli", "serve",
     "--udp-port", "0", "--ws-port", "0", "--session", sessionPath],
    { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "inherit"] },
  );
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("engine start timeout")), 10000);
    createInterface({ input: engine.stdout! }).on("line", (line) => {
      try {
        const msg = JSON.parse(line);
        if (msg.event === "listening") {
          wsPort = msg.wsPort;
          clearTimeout(timer);
          resolve();
        }
      } catch {
        // non-JSON engine output, ignore
      }
    });
    engine.on("error", reject);
    engine.on("exit", (code) => reject(new Error(`engine exited early (${code})`)));
  });
}

function stopEngine(): Promise<void> {
  return new Promise((resolve) => {
    engine.removeAllListeners("exit");
    engine.on("exit", () => resolve());
    engine.kill("SIGTERM");
  });
}

function connect(): Promise<WebSocket> {
  return new Promise((resolve, reject) => {
    const socket = new WebSocket(`ws://127.0.0.1:${wsPort}`);
    socket.on("open", () => resolve(socket));
    socket.on("error", reject);
  });
}

beforeAll(async () => {
  await startEngine();
}, 15000);

afterAll(async () => {
  await stopEngine();
  rmSync(sessionDir, { recursive: true, force: true });
});

describe("engine conformance over the UI socket", () => {
  it("replays a full click script into a matching session log", async () => {
    const socket = await connect();
    const received: unknown[] = [];
    socket.on("message", (data) => received.push(JSON.parse(data.toString())));

    // Click script: each mode in turn, four pads under each, covering
    // pads 1..12; every outbound message must validate.
    const script: ClientMessage[] = [];
    const modes: Mode[] = ["cartoon", "animal", "generative"];
    modes.forEach((mode, m) => {
      script.push(modeMessage(mode));
      for (let i = 0; i < 4; i++) {
        const pad = m * 4 + i + 1;
        script.push(pressMessage(pad));
        script.push(releaseMessage(pad));
      }
    });
    for (const message of script) {
      expect(isClientMessage(message)).toBe(true);
      socket.send(JSON.stringify(message));
      await new Promise((r) => setTimeout(r, 15));
    }
    // wait for all 12 sound broadcasts (plus states) to arrive
    for (let i = 0; i < 100 && received.length < 16; i++) {
      await new Promise((r) => setTimeout(r, 50));
    }
    socket.close();

    // every broadcast validates against the schema
    for (const event of received) {
      expect(isServerEvent(event), JSON.stringify(event)).toBe(true);
    }
    const sounds = received.filter(
      (e): e is { type: "sound"; pad: number; soundId: string } =>
        (e as { type: string }).type === "sound",
    );
    expect(sounds.map((s) => s.pad)).toEqual([...Array(12).keys()].map((i) => i + 1));
    expect(sounds[0].soundId).toBe("cartoon/1");
    expect(sounds[4].soundId).toBe("animal/5");
    expect(sounds[8].soundId).toBe("gen/9");

    // the engine's log must mirror the click script exactly
    await new Promise((r) => setTimeout(r, 200));
    const records = readFileSync(sessionPath, "utf8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line));
    expect(records[0].kind).toBe("header");
    const clicks = records
      .filter((r) => r.kind === "press" || r.kind === "mode")
      .map((r) => (r.kind === "mode" ? `mode:${r.mode}` : `press:${r.pad}`));
    const expected = script
      .filter((m) => m.type !== "release")
      .map((m) => (m.type === "mode" ? `mode:${m.mode}` : `press:${m.pad}`));
    expect(clicks).toEqual(expected);
    const releases = records.filter((r) => r.kind === "release").map((r) => r.pad);
    expect(releases).toEqual([...Array(12).keys()].map((i) => i + 1));
  }, 30000);

  it("sends the authoritative state on connect", async () => {
    const socket = await connect();
    const first = await new Promise<unknown>((resolve) => {
      socket.once("message", (data) => resolve(JSON.parse(data.toString())));
    });
    expect(isServerEvent(first)).toBe(true);
    expect((first as { type: string }).type).toBe("state");
    // previous test left the engine in generative mode
    expect((first as { mode: string }).mode).toBe("generative");
    socket.close();
  });
});
