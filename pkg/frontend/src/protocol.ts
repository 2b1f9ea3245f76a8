// Message schema for the engine's UI socket: one JSON object per
// WebSocket message.  Validation is strict on both directions so a
// schema drift fails loudly instead of silently desyncing.

export type Mode = "cartoon" | "animal" | "generative";

export const MODES: readonly Mode[] = ["cartoon", "animal", "generative"];
export const PAD_COUNT = 12;

export interface PressMessage {
  type: "press";
  pad: number;
}

export interface ReleaseMessage {
  type: "release";
  pad: number;
}

export interface ModeMessage {
  type: "mode";
  mode: Mode;
}

export type ClientMessage = PressMessage | ReleaseMessage | ModeMessage;

export interface SoundEvent {
  type: "sound";
  pad: number;
  soundId: string;
  gain: number;
  tMs: number;
  pitch?: number;
}

export interface StateEvent {
  type: "state";
  mode: Mode;
  masterGain: number;
}

export type ServerEvent = SoundEvent | StateEvent;

function isPad(x: unknown): x is number {
  return typeof x === "number" && Number.isInteger(x) && x >= 1 && x <= PAD_COUNT;
}

function isMode(x: unknown): x is Mode {
  return typeof x === "string" && (MODES as readonly string[]).includes(x);
}

export function isClientMessage(value: unknown): value is ClientMessage {
  if (typeof value !== "object" || value === null) return false;
  const msg = value as Record<string, unknown>;
  switch (msg.type) {
    case "press":
    case "release":
      return isPad(msg.pad);
    case "mode":
      return isMode(msg.mode);
    default:
      return false;
  }
}

export function isServerEvent(value: unknown): value is ServerEvent {
  if (typeof value !== "object" || value === null) return false;
  const msg = value as Record<string, unknown>;
  if (msg.type === "sound") {
    return (
      isPad(msg.pad) &&
      typeof msg.soundId === "string" &&
      typeof msg.gain === "number" &&
      msg.gain >= 0 &&
      msg.gain <= 1 &&
      typeof msg.tMs === "number" &&
      (msg.pitch === undefined ||
        (typeof msg.pitch === "number" && msg.pitch >= 0 && msg.pitch <= 127))
    );
  }
  if (msg.type === "state") {
    return (
      isMode(msg.mode) &&
      typeof msg.masterGain === "number" &&
      msg.masterGain >= 0 &&
      msg.masterGain <= 1
    );
  }
  return false;
}

export function pressMessage(pad: number): PressMessage {
  if (!isPad(pad)) throw new Error(`pad ${pad} out of 1..${PAD_COUNT}`);
  return { type: "press", pad };
}

export function releaseMessage(pad: number): ReleaseMessage {
  if (!isPad(pad)) throw new Error(`pad ${pad} out of 1..${PAD_COUNT}`);
  return { type: "release", pad };
}

export function modeMessage(mode: Mode): ModeMessage {
  return { type: "mode", mode };
}

export function parseServerEvent(raw: string): ServerEvent | null {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    return null;
  }
  return isServerEvent(value) ? value : null;
}
