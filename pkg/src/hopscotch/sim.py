"""Virtual-time pipeline: JumpScript -> firmware simulator -> engine ->
session log.  Fully deterministic, so CI needs no wall clock, audio
device, or network."""

from __future__ import annotations

from .engine import Engine, SessionLog
from .firmware import DebounceConfig, JumpScript, run_script
from .sieve import DEFAULT_SIEVE


def simulate_session(
    script: JumpScript,
    cfg: DebounceConfig = DebounceConfig(),
    sieve_expr: str = DEFAULT_SIEVE,
    base_midi: int = 48,
    duration_ms: float | None = None,
) -> SessionLog:
    """Run the script through the simulated firmware and the engine.

    Mode clicks bypass the wire (they are PC-side mouse input) and apply
    just before any messages stamped at or after their click time.
    """
    engine = Engine(sieve_expr=sieve_expr, base_midi=base_midi)
    stream = run_script(script, cfg, duration_ms)
    clicks = list(script.mode_clicks())
    ci = 0
    for t, msg in stream:
        while ci < len(clicks) and clicks[ci].t_ms <= t:
            engine.set_mode(clicks[ci].mode, clicks[ci].t_ms)
            ci += 1
        engine.ingest(msg, t)
    for click in clicks[ci:]:
        engine.set_mode(click.mode, click.t_ms)
    return engine.log
