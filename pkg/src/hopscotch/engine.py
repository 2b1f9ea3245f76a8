"""The live core: turns protocol messages and UI commands into sound
commands under one of three sound modes, recording everything to a
replayable session log.

The session log is JSON Lines: a header record followed by time-ordered
press/release/mode/sensor/sound records.  Replaying the input records
through a fresh engine reproduces the recorded sound commands exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, TextIO

from . import sieve as sieve_mod
from .firmware import ADC_MAX, MODES
from .osc import OscMessage, SENSOR_ADDRESSES, parse_trigger_address

LOG_VERSION = 1
DEFAULT_BASE_MIDI = 48
INITIAL_MODE = "cartoon"

#: sound_id prefix per mode
MODE_PREFIX = {"cartoon": "cartoon", "animal": "animal", "generative": "gen"}

GAIN_ADDRESS = "/Slider_data"
ACCENT_ADDRESS = "/piezo_data"


class EngineError(Exception):
    pass


class SessionLogError(Exception):
    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"record {index}: {message}"
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class SoundCommand:
    t_ms: int
    pad: int
    sound_id: str
    gain: float
    pitch: Optional[int] = None

    def to_record(self) -> dict:
        return {
            "kind": "sound",
            "t": self.t_ms,
            "pad": self.pad,
            "soundId": self.sound_id,
            "pitch": self.pitch,
            "gain": self.gain,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SoundCommand":
        return cls(
            t_ms=rec["t"],
            pad=rec["pad"],
            sound_id=rec["soundId"],
            gain=rec["gain"],
            pitch=rec.get("pitch"),
        )


class SessionLog:
    """Ordered session records with an optional write-through sink.

    With a sink attached every record is written and flushed as it is
    appended, so an interrupted live session still leaves a complete,
    parseable log.
    """

    def __init__(self, header: dict, sink: TextIO | None = None):
        self.header = header
        self.records: list[dict] = []
        self._sink = sink
        if sink is not None:
            sink.write(json.dumps(header) + "\n")
            sink.flush()

    def append(self, record: dict) -> None:
        self.records.append(record)
        if self._sink is not None:
            self._sink.write(json.dumps(record) + "\n")
            self._sink.flush()

    def dumps(self) -> str:
        lines = [json.dumps(self.header)]
        lines += [json.dumps(r) for r in self.records]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SessionLog":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise SessionLogError("empty log")
        records = []
        for i, line in enumerate(lines):
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SessionLogError(f"invalid JSON ({exc.msg})", i) from None
            if not isinstance(rec, dict) or "kind" not in rec:
                raise SessionLogError('missing "kind" field', i)
            records.append(rec)
        if records[0]["kind"] != "header":
            raise SessionLogError("first record must be the header", 0)
        log = cls(records[0])
        last_t = 0
        for i, rec in enumerate(records[1:], start=1):
            kind = rec["kind"]
            if kind not in ("press", "release", "mode", "sensor", "sound"):
                raise SessionLogError(f"unknown kind {kind!r}", i)
            t = rec.get("t")
            if not isinstance(t, (int, float)):
                raise SessionLogError("missing timestamp", i)
            if t < last_t:
                raise SessionLogError("records out of time order", i)
            last_t = t
            log.records.append(rec)
        return log

    @classmethod
    def load(cls, path) -> "SessionLog":
        with open(path) as fh:
            return cls.loads(fh.read())

    def sound_commands(self) -> list[SoundCommand]:
        return [
            SoundCommand.from_record(r) for r in self.records if r["kind"] == "sound"
        ]


def make_header(
    sieve_expr: str = sieve_mod.DEFAULT_SIEVE,
    base_midi: int = DEFAULT_BASE_MIDI,
    created: str = "1970-01-01T00:00:00Z",
) -> dict:
    return {
        "kind": "header",
        "version": LOG_VERSION,
        "sieve": sieve_expr,
        "baseMidi": base_midi,
        "mode": INITIAL_MODE,
        "created": created,
    }


class Engine:
    """Owns the engine state; must be driven from a single context."""

    def __init__(
        self,
        sieve_expr: str = sieve_mod.DEFAULT_SIEVE,
        base_midi: int = DEFAULT_BASE_MIDI,
        sink: TextIO | None = None,
        created: str = "1970-01-01T00:00:00Z",
        logging: bool = True,
    ):
        self.sieve_text = sieve_expr
        self.sieve = sieve_mod.parse_sieve(sieve_expr)
        self.base_midi = base_midi
        self.mode = INITIAL_MODE
        self.master_gain = 1.0
        self.accent = 0.0
        self.unknown_count = 0
        self.press_errors = 0
        self.logging = logging
        self.log = SessionLog(make_header(sieve_expr, base_midi, created), sink)

    def _record(self, rec: dict) -> None:
        if self.logging:
            self.log.append(rec)

    @property
    def gain(self) -> float:
        # Accent lifts the level above a floor of half scale so unscripted
        # sessions stay audible.  Rounded so commands survive a JSON
        # round trip bit-exactly.
        return round(self.master_gain * (0.5 + 0.5 * self.accent), 6)

    def set_mode(self, mode: str, t_ms: int) -> None:
        if mode not in MODES:
            raise EngineError(f"unknown mode {mode!r}")
        self.mode = mode
        self._record({"kind": "mode", "t": t_ms, "mode": mode})

    def press(self, pad: int, t_ms: int, synth_release: bool = False) -> SoundCommand | None:
        """Handle a pad press; returns the sound command, or None when the
        generative scale is empty (the press is still logged)."""
        self._record({"kind": "press", "t": t_ms, "pad": pad})
        if synth_release:
            # Firmware reports completed contacts only, so press and
            # release collapse onto the same poll timestamp.
            self._record({"kind": "release", "t": t_ms, "pad": pad})
        pitch = None
        if self.mode == "generative":
            try:
                pitch = sieve_mod.to_pitch(self.sieve, pad - 1, self.base_midi)
            except sieve_mod.EmptyScaleError:
                self.press_errors += 1
                return None
        cmd = SoundCommand(
            t_ms=t_ms,
            pad=pad,
            sound_id=f"{MODE_PREFIX[self.mode]}/{pad}",
            gain=self.gain,
            pitch=pitch,
        )
        self._record(cmd.to_record())
        return cmd

    def release(self, pad: int, t_ms: int) -> None:
        self._record({"kind": "release", "t": t_ms, "pad": pad})

    def _sensor(self, address: str, value: int, t_ms: int) -> None:
        if address == GAIN_ADDRESS:
            self.master_gain = value / ADC_MAX
        elif address == ACCENT_ADDRESS:
            self.accent = value / ADC_MAX
        self._record({"kind": "sensor", "t": t_ms, "address": address, "value": value})

    def ingest(self, msg: OscMessage, t_ms: int) -> list[SoundCommand]:
        """Route one decoded protocol message; total over all inputs."""
        pad = parse_trigger_address(msg.address)
        if pad is not None:
            state = msg.args[0] if msg.args else 0
            if state == 1:
                cmd = self.press(pad, t_ms, synth_release=True)
                return [cmd] if cmd is not None else []
            return []
        if msg.address in SENSOR_ADDRESSES:
            value = msg.args[0] if msg.args else 0
            if isinstance(value, int) and 0 <= value <= ADC_MAX:
                self._sensor(msg.address, value, t_ms)
            return []
        self.unknown_count += 1
        return []


def replay(log: SessionLog) -> list[SoundCommand]:
    """Re-derive the command stream from a log's input records.

    Pure function of the log; equals the recorded sound commands for any
    log the engine wrote.
    """
    header = log.header
    engine = Engine(
        sieve_expr=header.get("sieve", sieve_mod.DEFAULT_SIEVE),
        base_midi=header.get("baseMidi", DEFAULT_BASE_MIDI),
        logging=False,
    )
    commands: list[SoundCommand] = []
    for i, rec in enumerate(log.records):
        kind = rec["kind"]
        try:
            if kind == "mode":
                engine.set_mode(rec["mode"], rec["t"])
            elif kind == "sensor":
                engine._sensor(rec["address"], rec["value"], rec["t"])
            elif kind == "press":
                cmd = engine.press(rec["pad"], rec["t"])
                if cmd is not None:
                    commands.append(cmd)
        except (KeyError, EngineError) as exc:
            raise SessionLogError(f"unreplayable record: {exc}", i + 1) from None
    return commands
