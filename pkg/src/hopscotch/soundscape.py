"""Offline multitrack rendering of a session's sound commands.

Each command spawns one voice at its timestamp; voices are summed
(full polyphonic overlap), hard-clamped to [-1, 1] and quantized to
16-bit PCM at 44.1 kHz.  Slots without a sample file fall back to a
synthesized decaying tone so the repository ships no audio assets.
"""

from __future__ import annotations

import json
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import sieve as sieve_mod
from .engine import DEFAULT_BASE_MIDI, MODE_PREFIX, SessionLog, SoundCommand
from .osc import PAD_COUNT

FALLBACK_TONE_MS = 400.0
FALLBACK_PEAK = 0.8


@dataclass(frozen=True)
class RenderConfig:
    sample_rate: int = 44100
    bit_depth: int = 16
    stems: bool = False

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")
        if self.bit_depth != 16:
            raise ValueError("only 16-bit output is supported")


def midi_to_hz(pitch: int) -> float:
    return 440.0 * 2.0 ** ((pitch - 69) / 12.0)


def synth_tone(
    midi_pitch: int,
    duration_ms: float = FALLBACK_TONE_MS,
    sample_rate: int = 44100,
    peak: float = FALLBACK_PEAK,
) -> np.ndarray:
    """Exponentially decaying sine, peak amplitude `peak`, float64 mono."""
    if not 0 <= midi_pitch <= 127:
        raise ValueError(f"pitch {midi_pitch} out of 0..127")
    n = round(duration_ms * sample_rate / 1000.0)
    t = np.arange(n) / sample_rate
    tau = (duration_ms / 1000.0) / 5.0
    return peak * np.exp(-t / tau) * np.sin(2.0 * np.pi * midi_to_hz(midi_pitch) * t)


@dataclass
class SampleBank:
    """(mode, pad) -> mono float buffer; every slot resolves to something."""

    sample_rate: int = 44100
    slots: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    fallback_sieve: str = sieve_mod.DEFAULT_SIEVE

    def _fallback_pitch(self, pad: int) -> int:
        expr = sieve_mod.parse_sieve(self.fallback_sieve)
        return sieve_mod.to_pitch(expr, pad - 1, DEFAULT_BASE_MIDI)

    def voice_buffer(self, cmd: SoundCommand) -> np.ndarray:
        """The source buffer for a command; generative voices are always
        synthesized at the command's pitch."""
        if cmd.pitch is not None:
            return synth_tone(cmd.pitch, sample_rate=self.sample_rate)
        key = cmd.sound_id
        buf = self.slots.get(key)
        if buf is None:
            pad = int(key.rsplit("/", 1)[1])
            buf = synth_tone(self._fallback_pitch(pad), sample_rate=self.sample_rate)
            self.slots[key] = buf
        return buf

    @property
    def max_tail_s(self) -> float:
        lengths = [len(b) for b in self.slots.values()]
        fallback_len = round(FALLBACK_TONE_MS * self.sample_rate / 1000.0)
        return max(lengths + [fallback_len]) / self.sample_rate


def _read_wav_mono(path: Path, sample_rate: int) -> np.ndarray:
    with wave.open(str(path), "rb") as wf:
        if wf.getframerate() != sample_rate:
            raise ValueError(
                f"sample rate {wf.getframerate()} != {sample_rate} (resample offline)"
            )
        if wf.getsampwidth() != 2:
            raise ValueError("only 16-bit PCM samples are supported")
        raw = np.frombuffer(wf.readframes(wf.getnframes()), dtype="<i2")
        if wf.getnchannels() > 1:
            raw = raw.reshape(-1, wf.getnchannels()).mean(axis=1)
    return raw.astype(np.float64) / 32767.0


def load_bank(manifest_path, sample_rate: int = 44100) -> SampleBank:
    """Load a "mode/pad" -> wav-path manifest; unreadable or missing
    entries fall back to synthesized tones with a warning."""
    path = Path(manifest_path)
    try:
        manifest = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"unreadable manifest {path}: {exc}") from exc
    bank = SampleBank(sample_rate=sample_rate)
    valid_keys = {
        f"{prefix}/{pad}"
        for prefix in MODE_PREFIX.values()
        for pad in range(1, PAD_COUNT + 1)
    }
    for key, value in manifest.items():
        if key.startswith("_"):
            continue  # comment keys
        if key not in valid_keys:
            bank.warnings.append(f"ignoring unknown slot {key!r}")
            continue
        sample_path = path.parent / value
        try:
            bank.slots[key] = _read_wav_mono(sample_path, sample_rate)
        except (OSError, ValueError, wave.Error) as exc:
            bank.warnings.append(f"slot {key}: {exc}; using fallback tone")
    # Fill every remaining slot with its fallback so the bank is total.
    for key in sorted(valid_keys):
        if key not in bank.slots:
            pad = int(key.rsplit("/", 1)[1])
            bank.slots[key] = synth_tone(
                bank._fallback_pitch(pad), sample_rate=sample_rate
            )
    return bank


@dataclass
class RenderResult:
    mix: np.ndarray
    stems: dict  # pad -> float buffer, present when cfg.stems
    sample_rate: int

    def write(self, out_path, stems_dir=None) -> list[Path]:
        written = [write_wav(out_path, self.mix, self.sample_rate)]
        if stems_dir is not None:
            stems_dir = Path(stems_dir)
            stems_dir.mkdir(parents=True, exist_ok=True)
            for pad, buf in sorted(self.stems.items()):
                written.append(
                    write_wav(stems_dir / f"pad_{pad}.wav", buf, self.sample_rate)
                )
        return written


def quantize(buffer: np.ndarray) -> np.ndarray:
    clipped = np.clip(buffer, -1.0, 1.0)
    return np.clip(np.rint(clipped * 32767.0), -32768, 32767).astype("<i2")


def write_wav(path, buffer: np.ndarray, sample_rate: int) -> Path:
    """Atomic write: 16-bit mono PCM via temp file + rename."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with wave.open(str(tmp), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(sample_rate)
        wf.writeframes(quantize(buffer).tobytes())
    tmp.replace(path)
    return path


def render(log: SessionLog, bank: SampleBank, cfg: RenderConfig = RenderConfig()) -> RenderResult:
    """Mix all recorded sound commands into float buffers (pre-quantization
    values are kept so linearity can be checked before the clamp)."""
    commands = log.sound_commands()
    sr = cfg.sample_rate
    if not commands:
        empty = np.zeros(0)
        return RenderResult(empty, {}, sr)
    last_t = max(c.t_ms for c in commands)
    total = round(last_t * sr / 1000.0) + round(bank.max_tail_s * sr) + 1
    mix = np.zeros(total)
    stems: dict[int, np.ndarray] = {}
    for cmd in commands:
        voice = bank.voice_buffer(cmd) * cmd.gain
        start = round(cmd.t_ms * sr / 1000.0)
        mix[start : start + len(voice)] += voice
        if cfg.stems:
            stem = stems.setdefault(cmd.pad, np.zeros(total))
            stem[start : start + len(voice)] += voice
    return RenderResult(mix, stems, sr)


def onset_count(buffer: np.ndarray, threshold: float = 0.05, sample_rate: int = 44100) -> int:
    """Rising threshold crossings preceded by >= 50 ms below threshold."""
    quiet_needed = round(0.05 * sample_rate)
    above = np.abs(np.asarray(buffer)) >= threshold
    count = 0
    quiet_run = quiet_needed  # leading silence counts
    for a in above:
        if a:
            if quiet_run >= quiet_needed:
                count += 1
            quiet_run = 0
        else:
            quiet_run += 1
    return count
