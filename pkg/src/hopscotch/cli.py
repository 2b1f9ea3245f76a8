"""Command-line entry point wiring all the pieces together.

Subcommands: serve (live engine), sim (virtual-time firmware run),
render (session -> WAV), metrics (session -> scores/grades/figure),
sieve (explore sieve expressions).
"""

from __future__ import annotations

import asyncio
import json
import os
import sys
from pathlib import Path

import click

from . import metrics as metrics_mod
from . import sieve as sieve_mod
from .engine import Engine, SessionLog, SessionLogError
from .firmware import DebounceConfig, JumpScript, ScriptError
from .report import atomic_write_text, write_report
from .server import DEFAULT_UDP_PORT, DEFAULT_WS_PORT, run_server
from .sim import simulate_session
from .soundscape import RenderConfig, SampleBank, load_bank, render

ENV_UDP = "HOPSCOTCH_UDP_PORT"
ENV_WS = "HOPSCOTCH_WS_PORT"


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"config: {exc}")
    if not isinstance(cfg, dict):
        raise click.ClickException("config: top level must be an object")
    return cfg


def _resolve_ports(cfg: dict, udp_port, ws_port) -> tuple[int, int]:
    # Port 0 binds an ephemeral port; the server announces the real one.
    def pick(flag, env, key, default):
        if flag is not None:
            return flag
        if os.environ.get(env):
            return int(os.environ[env])
        return cfg.get(key, default)

    udp = pick(udp_port, ENV_UDP, "udp_port", DEFAULT_UDP_PORT)
    ws = pick(ws_port, ENV_WS, "ws_port", DEFAULT_WS_PORT)
    for name, port in (("udp", udp), ("ws", ws)):
        if not 0 <= port <= 65535:
            raise click.ClickException(f"{name} port {port} out of 0..65535")
    if udp == ws and udp != 0:
        raise click.ClickException("udp and ws ports must be distinct")
    return udp, ws


def _debounce(cfg: dict, threshold, period) -> DebounceConfig:
    try:
        return DebounceConfig(
            threshold_iterations=threshold or cfg.get("debounce_threshold", 100),
            iteration_period_ms=period or cfg.get("debounce_period_ms", 0.1),
        )
    except ValueError as exc:
        raise click.ClickException(f"firmware: {exc}")


@click.group()
def main():
    """Interactive hopscotch music system."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), help="JSON config file.")
@click.option("--udp-port", type=int, default=None, help="OSC/UDP listen port.")
@click.option("--ws-port", type=int, default=None, help="UI WebSocket port.")
@click.option("--session", "session_path", type=click.Path(), default="session.jsonl",
              show_default=True, help="Session log written live.")
@click.option("--sieve", "sieve_expr", default=None, help="Generative-mode sieve expression.")
@click.option("--base-midi", type=int, default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(config_path, udp_port, ws_port, session_path, sieve_expr, base_midi, host):
    """Run the live engine: OSC in over UDP, UI clients over WebSocket."""
    cfg = _load_config(config_path)
    udp, ws = _resolve_ports(cfg, udp_port, ws_port)
    sieve_expr = sieve_expr or cfg.get("sieve", sieve_mod.DEFAULT_SIEVE)
    base_midi = base_midi if base_midi is not None else cfg.get("base_midi", 48)
    try:
        sieve_mod.parse_sieve(sieve_expr)
    except sieve_mod.SieveError as exc:
        raise click.ClickException(f"sieve: {exc}")
    if not 0 <= base_midi <= 127:
        raise click.ClickException("base_midi must be in 0..127")
    import datetime

    created = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(session_path, "w") as sink:
        engine = Engine(sieve_expr=sieve_expr, base_midi=base_midi,
                        sink=sink, created=created)
        try:
            asyncio.run(run_server(engine, udp, ws, host=host))
        except OSError as exc:
            raise click.ClickException(f"server: {exc}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--script", "script_path", type=click.Path(exists=True), required=True,
              help="JumpScript JSON file.")
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Session log to write.")
@click.option("--sieve", "sieve_expr", default=None)
@click.option("--base-midi", type=int, default=None)
@click.option("--debounce-threshold", type=int, default=None)
@click.option("--debounce-period-ms", type=float, default=None)
@click.option("--duration-ms", type=float, default=None,
              help="Override the simulated run length.")
def sim(config_path, script_path, out_path, sieve_expr, base_midi,
        debounce_threshold, debounce_period_ms, duration_ms):
    """Feed a scripted jump sequence through the simulated firmware and
    the engine, writing a deterministic session log."""
    cfg = _load_config(config_path)
    dcfg = _debounce(cfg, debounce_threshold, debounce_period_ms)
    sieve_expr = sieve_expr or cfg.get("sieve", sieve_mod.DEFAULT_SIEVE)
    base_midi = base_midi if base_midi is not None else cfg.get("base_midi", 48)
    try:
        script = JumpScript.load(script_path)
    except (ScriptError, OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"firmware: {exc}")
    try:
        log = simulate_session(script, dcfg, sieve_expr=sieve_expr,
                               base_midi=base_midi, duration_ms=duration_ms)
    except sieve_mod.SieveError as exc:
        raise click.ClickException(f"sieve: {exc}")
    atomic_write_text(out_path, log.dumps())
    n_sounds = sum(1 for r in log.records if r["kind"] == "sound")
    click.echo(f"wrote {out_path}: {len(log.records)} records, {n_sounds} sound commands")


@main.command("render")
@click.option("--session", "session_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True, help="Mix WAV path.")
@click.option("--bank", "bank_path", type=click.Path(exists=True), default=None,
              help="Sample bank manifest (JSON); fallback tones without it.")
@click.option("--stems", is_flag=True, help="Also write one WAV per pad beside the mix.")
@click.option("--sample-rate", type=int, default=44100, show_default=True)
def render_cmd(session_path, out_path, bank_path, stems, sample_rate):
    """Render a session log to a 16-bit mono WAV soundscape."""
    try:
        log = SessionLog.load(session_path)
    except SessionLogError as exc:
        raise click.ClickException(f"engine: {exc}")
    if bank_path is not None:
        try:
            bank = load_bank(bank_path, sample_rate)
        except ValueError as exc:
            raise click.ClickException(f"soundscape: {exc}")
        for warning in bank.warnings:
            click.echo(f"warning: {warning}", err=True)
    else:
        bank = SampleBank(sample_rate=sample_rate)
    cfg = RenderConfig(sample_rate=sample_rate, stems=stems)
    result = render(log, bank, cfg)
    stems_dir = Path(out_path).parent if stems else None
    written = result.write(out_path, stems_dir=stems_dir)
    click.echo(f"wrote {', '.join(str(p) for p in written)}")


@main.command("metrics")
@click.option("--session", "session_path", type=click.Path(exists=True), required=True)
@click.option("--out-dir", type=click.Path(), default=None,
              help="Write report.json, report.csv and scores.png here.")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON report only.")
def metrics_cmd(session_path, out_dir, as_json):
    """Score a session on the six music parameters and grade A..E."""
    try:
        log = SessionLog.load(session_path)
    except SessionLogError as exc:
        raise click.ClickException(f"engine: {exc}")
    report = metrics_mod.compute(log)
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(metrics_mod.format_table(report))
    if out_dir is not None:
        paths = write_report(report, out_dir)
        click.echo(f"wrote {', '.join(str(p) for p in paths.values())}", err=True)


@main.command("sieve")
@click.option("--expr", required=True, help="Sieve expression, e.g. '3@0|4@1'.")
@click.option("--range", "range_text", default="0..12", show_default=True,
              help="Inclusive integer range LO..HI.")
def sieve_cmd(expr, range_text):
    """Print the points, intervals and period of a sieve expression."""
    try:
        lo_s, _, hi_s = range_text.partition("..")
        lo, hi = int(lo_s), int(hi_s)
    except ValueError:
        raise click.ClickException(f"bad range {range_text!r}, expected LO..HI")
    try:
        tree = sieve_mod.parse_sieve(expr)
        points = sieve_mod.generate(tree, lo, hi)
        period = sieve_mod.period(tree)
    except sieve_mod.SieveError as exc:
        raise click.ClickException(f"sieve: {exc}")
    click.echo(" ".join(str(p) for p in points) if points else "(empty)")
    if len(points) >= 2:
        click.echo("intervals: " + " ".join(str(i) for i in sieve_mod.intervals(points)))
    click.echo(f"period: {period}")


if __name__ == "__main__":
    main()
