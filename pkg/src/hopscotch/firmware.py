"""Deterministic simulator of the pad microcontroller loop.

Reproduces the firmware's behavior against a virtual clock: every 50 ms
it reads the six 10-bit analog channels, emits one OSC message per
channel, then one "/triggerN" message per pad carrying the debounced
button state.  A contact is reported exactly once, on the first poll at
or after its release (the firmware busy-waits for release inside its
button routine, so a held pad never re-triggers).

Scripted inputs arrive as a JumpScript: a JSON document with an
"actions" array of pad contacts, sensor value changes and mode clicks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .osc import SENSOR_ADDRESSES, OscMessage, PAD_COUNT, trigger_address

POLL_PERIOD_MS = 50

ADC_MAX = 1023

#: JumpScript channel names -> OSC addresses, in firmware emission order.
CHANNELS = {
    "bend1": "/bend_data1",
    "bend2": "/bend_data2",
    "optic": "/optic_data",
    "piezo": "/piezo_data",
    "fsr": "/fsr_data",
    "slider": "/Slider_data",
}

MODES = ("cartoon", "animal", "generative")


class ScriptError(Exception):
    pass


@dataclass(frozen=True)
class DebounceConfig:
    """The firmware counts busy-loop iterations while the line is held low;
    the simulator converts that count to a wall duration per iteration."""

    threshold_iterations: int = 100
    iteration_period_ms: float = 0.1

    def __post_init__(self):
        if self.threshold_iterations < 1:
            raise ValueError("threshold_iterations must be >= 1")
        if self.iteration_period_ms <= 0:
            raise ValueError("iteration_period_ms must be > 0")

    @property
    def min_press_ms(self) -> float:
        return self.threshold_iterations * self.iteration_period_ms


def button_pressed(contact_duration_ms: float, cfg: DebounceConfig = DebounceConfig()) -> int:
    """Debounced state for one completed contact: 1 iff it survived the
    counting loop, i.e. the iteration count exceeded the threshold."""
    if contact_duration_ms < 0:
        raise ValueError("contact duration must be >= 0")
    # Epsilon guards against float division landing just under an integer
    # (10.1 / 0.1 == 100.999...).
    iterations = int(contact_duration_ms / cfg.iteration_period_ms + 1e-9)
    return 1 if iterations > cfg.threshold_iterations else 0


@dataclass(frozen=True)
class Contact:
    t_ms: int
    pad: int
    duration_ms: float

    @property
    def end_ms(self) -> float:
        return self.t_ms + self.duration_ms


@dataclass(frozen=True)
class SensorSet:
    t_ms: int
    channel: str
    value: int


@dataclass(frozen=True)
class ModeClick:
    t_ms: int
    mode: str


@dataclass
class JumpScript:
    actions: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, doc: dict) -> "JumpScript":
        if not isinstance(doc, dict) or "actions" not in doc:
            raise ScriptError('script must be an object with an "actions" array')
        actions = []
        last_t = 0
        last_end: dict[int, float] = {}
        for i, entry in enumerate(doc["actions"]):
            where = f"actions[{i}]"
            if not isinstance(entry, dict):
                raise ScriptError(f"{where}: not an object")
            kind = entry.get("kind")
            t = entry.get("t_ms")
            if not isinstance(t, (int, float)) or t < 0:
                raise ScriptError(f"{where}: bad t_ms {t!r}")
            if t < last_t:
                raise ScriptError(f"{where}: timestamps must be non-decreasing")
            last_t = t
            if kind == "contact":
                pad = entry.get("pad")
                dur = entry.get("duration_ms")
                if not isinstance(pad, int) or not 1 <= pad <= PAD_COUNT:
                    raise ScriptError(f"{where}: pad must be 1..{PAD_COUNT}")
                if not isinstance(dur, (int, float)) or dur < 0:
                    raise ScriptError(f"{where}: bad duration_ms {dur!r}")
                if t < last_end.get(pad, -1.0):
                    raise ScriptError(f"{where}: overlapping contact on pad {pad}")
                last_end[pad] = t + dur
                actions.append(Contact(int(t), pad, float(dur)))
            elif kind == "sensor":
                channel = entry.get("channel")
                value = entry.get("value")
                if channel not in CHANNELS:
                    raise ScriptError(f"{where}: unknown channel {channel!r}")
                if not isinstance(value, int) or not 0 <= value <= ADC_MAX:
                    raise ScriptError(f"{where}: value must be 0..{ADC_MAX}")
                actions.append(SensorSet(int(t), channel, value))
            elif kind == "mode":
                mode = entry.get("mode")
                if mode not in MODES:
                    raise ScriptError(f"{where}: unknown mode {mode!r}")
                actions.append(ModeClick(int(t), mode))
            else:
                raise ScriptError(f"{where}: unknown kind {kind!r}")
        return cls(actions)

    @classmethod
    def load(cls, path) -> "JumpScript":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def mode_clicks(self) -> list[ModeClick]:
        return [a for a in self.actions if isinstance(a, ModeClick)]

    def end_ms(self) -> float:
        end = 0.0
        for a in self.actions:
            end = max(end, a.end_ms if isinstance(a, Contact) else float(a.t_ms))
        return end


class Simulator:
    """Steps the firmware loop over virtual time.

    Output is a pure function of (script, config): re-running a script
    yields an identical message stream.
    """

    def __init__(self, script: JumpScript, cfg: DebounceConfig = DebounceConfig()):
        self.cfg = cfg
        self.sensors = {name: 0 for name in CHANNELS}
        self._sensor_sets = sorted(
            (a for a in script.actions if isinstance(a, SensorSet)),
            key=lambda a: a.t_ms,
        )
        self._contacts = sorted(
            (a for a in script.actions if isinstance(a, Contact)),
            key=lambda a: a.end_ms,
        )
        self._prev_poll_ms = 0
        self._pending = {pad: 0 for pad in range(1, PAD_COUNT + 1)}

    def poll_step(self, now_ms: int) -> list[OscMessage]:
        """One pass of the firmware main loop at virtual time now_ms."""
        while self._sensor_sets and self._sensor_sets[0].t_ms <= now_ms:
            action = self._sensor_sets.pop(0)
            self.sensors[action.channel] = action.value
        messages = [
            OscMessage(CHANNELS[name], (self.sensors[name],)) for name in CHANNELS
        ]
        # Contacts released since the previous poll report their debounced
        # state now; everything else reads 0, matching the per-pass
        # buttonPressed() calls in the firmware.  A pad reports at most
        # one completion per poll; extras carry over, so every qualifying
        # contact yields exactly one arg-1 message.
        while self._contacts and self._contacts[0].end_ms <= now_ms:
            contact = self._contacts.pop(0)
            if contact.end_ms > self._prev_poll_ms:
                self._pending[contact.pad] += button_pressed(
                    contact.duration_ms, self.cfg
                )
        states = {}
        for pad in range(1, PAD_COUNT + 1):
            if self._pending[pad] > 0:
                self._pending[pad] -= 1
                states[pad] = 1
            else:
                states[pad] = 0
        messages += [
            OscMessage(trigger_address(pad), (states[pad],))
            for pad in range(1, PAD_COUNT + 1)
        ]
        self._prev_poll_ms = now_ms
        return messages


def run_script(
    script: JumpScript,
    cfg: DebounceConfig = DebounceConfig(),
    duration_ms: float | None = None,
) -> list[tuple[int, OscMessage]]:
    """Run the simulator loop, returning the timestamped message stream.

    Polls happen at 50, 100, ... up to and including duration_ms, which
    defaults to one poll period past the last scripted action so every
    contact gets reported.
    """
    drain = duration_ms is None
    if duration_ms is None:
        duration_ms = script.end_ms() + POLL_PERIOD_MS
    sim = Simulator(script, cfg)
    stream = []
    t = POLL_PERIOD_MS
    while t <= duration_ms:
        for msg in sim.poll_step(t):
            stream.append((t, msg))
        t += POLL_PERIOD_MS
    # Completions can carry past the nominal end when several contacts on
    # one pad finish in the same window; keep polling until all reported.
    while drain and (sim._contacts or any(sim._pending.values())):
        for msg in sim.poll_step(t):
            stream.append((t, msg))
        t += POLL_PERIOD_MS
    return stream
