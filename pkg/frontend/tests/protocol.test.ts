import { describe, expect, it } from "vitest";

import {
  isClientMessage,
  isServerEvent,
  modeMessage,
  parseServerEvent,
  pressMessage,
  releaseMessage,
} from "../src/protocol.js";
import { COURT_ROWS, allPadsInCourt, padForKey } from "../src/layout.js";

describe("client messages", () => {
  it("builds valid press/release/mode messages", () => {
    expect(pressMessage(1)).toEqual({ type: "press", pad: 1 });
    expect(releaseMessage(12)).toEqual({ type: "release", pad: 12 });
    expect(modeMessage("animal")).toEqual({ type: "mode", mode: "animal" });
    expect(isClientMessage(pressMessage(7))).toBe(true);
  });

  it("rejects out-of-range pads", () => {
    expect(() => pressMessage(0)).toThrow();
    expect(() => pressMessage(13)).toThrow();
    expect(isClientMessage({ type: "press", pad: 1.5 })).toBe(false);
  });

  it("rejects unknown types and modes", () => {
    expect(isClientMessage({ type: "jump", pad: 1 })).toBe(false);
    expect(isClientMessage({ type: "mode", mode: "disco" })).toBe(false);
    expect(isClientMessage(null)).toBe(false);
  });
});

describe("server events", () => {
  it("accepts sound events with and without pitch", () => {
    expect(
      isServerEvent({ type: "sound", pad: 3, soundId: "animal/3", gain: 0.5, tMs: 100 }),
    ).toBe(true);
    expect(
      isServerEvent({
        type: "sound", pad: 3, soundId: "gen/3", gain: 0.5, tMs: 100, pitch: 51,
      }),
    ).toBe(true);
  });

  it("rejects malformed events", () => {
    expect(isServerEvent({ type: "sound", pad: 3, gain: 0.5, tMs: 1 })).toBe(false);
    expect(isServerEvent({ type: "state", mode: "cartoon", masterGain: 2 })).toBe(false);
    expect(parseServerEvent("not json")).toBeNull();
    expect(parseServerEvent('{"type":"noise"}')).toBeNull();
  });

  it("parses a state broadcast", () => {
    expect(parseServerEvent('{"type":"state","mode":"generative","masterGain":1.0}'))
      .toEqual({ type: "state", mode: "generative", masterGain: 1.0 });
  });
});

describe("court layout and key map", () => {
  it("covers pads 1..12 exactly once", () => {
    expect(allPadsInCourt()).toBe(true);
  });

  it("starts at the bottom with pad 1", () => {
    expect(COURT_ROWS[COURT_ROWS.length - 1]).toContain(1);
    expect(COURT_ROWS[0]).toEqual([12]);
  });

  it("maps the number row to pads", () => {
    expect(padForKey("1")).toBe(1);
    expect(padForKey("9")).toBe(9);
    expect(padForKey("0")).toBe(10);
    expect(padForKey("-")).toBe(11);
    expect(padForKey("=")).toBe(12);
    expect(padForKey("q")).toBeNull();
  });
});
