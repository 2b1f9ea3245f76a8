"""Objective proxies for the six session music parameters, each scored
in [0, 1] and graded A..E on fixed bands.

Proxy definitions (versioned; the report embeds this number):

* rhythm_variety   — Shannon entropy of inter-onset intervals quantized
                     to 50 ms bins, normalized by log(occupied bins);
                     0 with fewer than 3 onsets or a single bin.
* pitch_sensation  — distinct pitch classes (generative commands) plus
                     distinct sound ids (sample commands), over 12.
* texture_change   — coefficient of variation of instantaneous
                     polyphony sampled every 100 ms.
* sound_response   — fraction of presses answered by a command within
                     50 ms.
* dynamic_variance — standard deviation of command gains over 0.5.
* timbre_change    — (mode switches + consecutive sound-id changes) over
                     (commands - 1).

All scores clamp to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import SessionLog
from .soundscape import FALLBACK_TONE_MS

PROXY_VERSION = 1

RHYTHM_BIN_MS = 50
TEXTURE_STEP_MS = 100
RESPONSE_WINDOW_MS = 50

SCORE_NAMES = (
    "rhythm_variety",
    "pitch_sensation",
    "texture_change",
    "sound_response",
    "dynamic_variance",
    "timbre_change",
)

GRADE_BANDS = (
    (0.90, "A"),
    (0.80, "B"),
    (0.70, "C"),
    (0.60, "D"),
    (0.0, "E"),
)


def grade(score: float) -> str:
    """A >= 0.9, B >= 0.8, C >= 0.7, D >= 0.6, else E."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [0, 1]")
    for lo, letter in GRADE_BANDS:
        if score >= lo:
            return letter
    return "E"


@dataclass(frozen=True)
class MetricReport:
    scores: dict
    grades: dict
    proxy_version: int = PROXY_VERSION

    def to_dict(self) -> dict:
        return {
            "proxyVersion": self.proxy_version,
            "scores": {k: round(v, 6) for k, v in self.scores.items()},
            "grades": dict(self.grades),
        }


def _clamp(x: float) -> float:
    return max(0.0, min(1.0, x))


def _entropy_norm(values: list[float], bin_ms: float) -> float:
    if len(values) < 2:
        return 0.0
    bins: dict[int, int] = {}
    for v in values:
        b = int(v // bin_ms)
        bins[b] = bins.get(b, 0) + 1
    k = len(bins)
    if k < 2:
        return 0.0
    total = len(values)
    h = -sum((c / total) * math.log(c / total) for c in bins.values())
    return _clamp(h / math.log(k))


def _std(values: list[float]) -> float:
    n = len(values)
    if n < 2:
        return 0.0
    mean = sum(values) / n
    return math.sqrt(sum((v - mean) ** 2 for v in values) / n)


def compute(log: SessionLog, voice_ms: float = FALLBACK_TONE_MS) -> MetricReport:
    """Score a session; pure function of the log contents."""
    commands = [r for r in log.records if r["kind"] == "sound"]
    presses = [r for r in log.records if r["kind"] == "press"]
    modes = [r for r in log.records if r["kind"] == "mode"]

    scores = dict.fromkeys(SCORE_NAMES, 0.0)

    onsets = sorted(c["t"] for c in commands)
    if len(onsets) >= 3:
        iois = [b - a for a, b in zip(onsets, onsets[1:])]
        scores["rhythm_variety"] = _entropy_norm(iois, RHYTHM_BIN_MS)

    distinct = set()
    for c in commands:
        if c.get("pitch") is not None:
            distinct.add(("pc", c["pitch"] % 12))
        else:
            distinct.add(("id", c["soundId"]))
    scores["pitch_sensation"] = _clamp(len(distinct) / 12.0)

    if commands:
        end = max(c["t"] for c in commands) + voice_ms
        polyphony = []
        t = 0.0
        while t <= end:
            polyphony.append(
                sum(1 for c in commands if c["t"] <= t < c["t"] + voice_ms)
            )
            t += TEXTURE_STEP_MS
        mean = sum(polyphony) / len(polyphony)
        if mean > 0:
            scores["texture_change"] = _clamp(_std(polyphony) / mean)

    if presses:
        answered = 0
        times = sorted(c["t"] for c in commands)
        for p in presses:
            if any(p["t"] <= t <= p["t"] + RESPONSE_WINDOW_MS for t in times):
                answered += 1
        scores["sound_response"] = _clamp(answered / len(presses))

    gains = [c["gain"] for c in commands]
    scores["dynamic_variance"] = _clamp(_std(gains) / 0.5)

    if len(commands) >= 2:
        switches = 0
        current = log.header.get("mode", "cartoon")
        for m in modes:
            if m["mode"] != current:
                switches += 1
                current = m["mode"]
        id_changes = sum(
            1
            for a, b in zip(commands, commands[1:])
            if a["soundId"] != b["soundId"]
        )
        scores["timbre_change"] = _clamp(
            (switches + id_changes) / (len(commands) - 1)
        )

    grades = {name: grade(score) for name, score in scores.items()}
    return MetricReport(scores, grades)


def format_table(report: MetricReport) -> str:
    """Aligned table in the style of a grade sheet: one row per grade,
    a mark under each parameter column."""
    headers = [n.replace("_", " ").title() for n in SCORE_NAMES]
    widths = [max(len(h), 6) for h in headers]
    lines = ["    " + "  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for letter in "ABCDE":
        cells = []
        for name, w in zip(SCORE_NAMES, widths):
            mark = "*" if report.grades[name] == letter else ""
            cells.append(mark.center(w))
        lines.append(f"  {letter} " + "  ".join(cells))
    lines.append("")
    lines.append(
        "    "
        + "  ".join(
            f"{report.scores[n]:.3f}".ljust(w) for n, w in zip(SCORE_NAMES, widths)
        )
    )
    return "\n".join(lines)
