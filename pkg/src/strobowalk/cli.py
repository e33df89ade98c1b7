"""
Command-line entry point.

Single runs::

    strobowalk walk --model harmonic --tau 1/5 --steps 200 --classical
    strobowalk scan --model free --steps 100 --grid 100 --threads 4
    strobowalk surface --model harmonic --steps 20 --grid 100

Figure presets write a directory of CSV files::

    strobowalk fig1 --output fig1/

Every CSV starts with ``#`` comment lines recording the run parameters. Output
path and thread count are not recorded since they cannot change the data.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .observables import classical_reference, distribution
from .output import emit_distribution, emit_scan, emit_trajectory
from .scan import spread_series, tau_scan
from .spectra import (
    FreeParticle,
    Harmonic,
    RationalOfTalbot,
    RealMultipleOfTalbot,
    SpectrumError,
    load_custom_table,
)
from .walk import (
    DEFAULT_COIN_AMPLITUDES,
    CoinOperator,
    ScheduleJitter,
    WalkConfig,
    default_origin,
    evolve,
    hadamard_coin,
    initial_state,
)

COMMANDS = ("walk", "scan", "surface", "fig1", "fig2", "fig3", "fig4", "fig5")
TWO_PI_TOKEN = "1/2pi"


class UsageError(ValueError):
    """Invalid command line; ``flag`` names the offending option."""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def parse_tau(text: str):
    """
    Interval relative to the Talbot time: ``p/q``, a decimal in [0, 1), or ``1/2pi``.
    """
    s = text.strip()
    if s == TWO_PI_TOKEN:
        return RealMultipleOfTalbot(1.0 / (2.0 * math.pi))
    if "/" in s:
        p_txt, q_txt = s.split("/", 1)
        try:
            p, q = int(p_txt), int(q_txt)
        except ValueError:
            raise UsageError("--tau", f"malformed rational {text!r}, expected p/q with integers") from None
        if q <= 0:
            raise UsageError("--tau", f"denominator q must be positive in {text!r}")
        if not 0 <= Fraction(p, q) < 1:
            raise UsageError("--tau", f"p/q must lie in [0, 1), got {text!r}")
        return RationalOfTalbot(p, q)
    try:
        x = float(s)
    except ValueError:
        raise UsageError("--tau", f"cannot parse {text!r}; use p/q, a decimal in [0,1) or 1/2pi") from None
    if not 0.0 <= x < 1.0:
        raise UsageError("--tau", f"multiple of T must lie in [0, 1), got {text!r}")
    return RealMultipleOfTalbot(x)


def _complex_list(text: str, n: int, flag: str) -> list[complex]:
    try:
        vals = [complex(v.replace(" ", "")) for v in text.split(",")]
    except ValueError:
        raise UsageError(flag, f"cannot parse complex numbers from {text!r}") from None
    if len(vals) != n:
        raise UsageError(flag, f"expected {n} comma-separated values, got {len(vals)}")
    return vals


def parse_coin(text: str) -> CoinOperator:
    if text == "hadamard":
        return hadamard_coin()
    vals = _complex_list(text, 4, "--coin")
    try:
        return CoinOperator(np.array(vals, dtype=np.complex128).reshape(2, 2))
    except ValueError:
        raise UsageError("--coin", "custom coin matrix is not unitary") from None


@dataclass
class RunSpec:
    command: str
    model: str = "harmonic"
    omega: float = 1.0
    mass: float = 1.0
    kick: float = 1.0
    rephasing_integer: int = 1
    spectrum_file: Optional[str] = None
    tau: str = "0"
    steps: int = 200
    coin: str = "hadamard"
    coin_amplitudes: Optional[str] = None
    origin: Optional[int] = None
    jitter: float = 0.0
    seed: int = 0
    grid: int = 100
    record_per_step: bool = False
    classical: bool = False
    trajectory: bool = False
    output: Optional[str] = None
    threads: int = 1

    def provenance(self) -> dict:
        """Parameters that determine the output, with defaults resolved."""
        d = asdict(self)
        d.pop("output")
        d.pop("threads")
        d["origin"] = self.walk_config().origin
        if self.command in ("scan", "surface"):
            for k in ("tau", "jitter", "seed", "classical", "trajectory"):
                d.pop(k)
        else:
            for k in ("grid", "record_per_step"):
                d.pop(k)
        return d

    def comments(self) -> list[str]:
        return [f"strobowalk {__version__}", "run " + json.dumps(self.provenance(), sort_keys=True)]

    def spectrum(self):
        if self.model == "harmonic":
            return Harmonic(self.omega, self.rephasing_integer)
        if self.model == "free":
            return FreeParticle(self.mass, self.kick)
        if self.spectrum_file is None:
            raise UsageError("--spectrum-file", "required for --model custom")
        return load_custom_table(self.spectrum_file, self.rephasing_integer)

    def walk_config(self) -> WalkConfig:
        model = self.spectrum()
        amps = DEFAULT_COIN_AMPLITUDES if self.coin_amplitudes is None else \
            tuple(_complex_list(self.coin_amplitudes, 2, "--coin-amplitudes"))
        jitter = ScheduleJitter(self.jitter, self.seed) if self.jitter else None
        origin = default_origin(model, self.steps) if self.origin is None else self.origin
        return WalkConfig(model=model, tau=parse_tau(self.tau), steps=self.steps, coin=parse_coin(self.coin),
                          coin_amplitudes=amps, origin=origin, jitter=jitter)

    def validate(self) -> "RunSpec":
        if self.command not in COMMANDS:
            raise UsageError("command", f"unknown command {self.command!r}")
        if self.steps < 0:
            raise UsageError("--steps", f"steps must be non-negative, got {self.steps}")
        if self.grid < 2:
            raise UsageError("--grid", f"grid must be >= 2, got {self.grid}")
        if self.threads < 1:
            raise UsageError("--threads", f"thread count must be >= 1, got {self.threads}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed", "seed must be an unsigned 64-bit integer")
        if not 0.0 <= self.jitter < 0.5:
            raise UsageError("--jitter", f"half-width must lie in [0, 0.5), got {self.jitter}")
        parse_tau(self.tau)
        parse_coin(self.coin)
        if self.coin_amplitudes is not None:
            amps = _complex_list(self.coin_amplitudes, 2, "--coin-amplitudes")
            try:
                initial_state(0, amps)
            except ValueError as exc:
                raise UsageError("--coin-amplitudes", str(exc)) from None
        try:
            cfg = self.walk_config()
            if self.command in ("walk", "scan", "surface"):
                cfg.validate()
        except SpectrumError as exc:
            raise UsageError("--model", str(exc)) from None
        except (RuntimeError, ValueError) as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError("--origin", str(exc)) from None
        return self


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError("args", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="strobowalk", description="Stroboscopic coined quantum walks on a line.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", choices=("harmonic", "free", "custom"), default="harmonic")
    p.add_argument("--omega", type=float, default=1.0, help="oscillator angular frequency")
    p.add_argument("--mass", type=float, default=1.0, help="free-particle mass")
    p.add_argument("--kick", type=float, default=1.0, help="free-particle momentum quantum")
    p.add_argument("--rephasing-integer", type=int, default=1)
    p.add_argument("--spectrum-file", help="two-column 'index energy' table for --model custom")
    p.add_argument("--tau", default="0", help="interval as p/q of T, a decimal in [0,1), or 1/2pi")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--coin", default="hadamard", help="'hadamard' or four complex entries a,b,c,d (row-major)")
    p.add_argument("--coin-amplitudes", help="initial coin pair as two complex numbers, e.g. '0.6,0.8j'")
    p.add_argument("--origin", type=int, help="start index n0 (harmonic default: steps + 100)")
    p.add_argument("--jitter", type=float, default=0.0, help="uniform interval jitter half-width, fraction of T")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", type=int, default=100, help="number of equal divisions of T in a scan")
    p.add_argument("--record-per-step", action="store_true")
    p.add_argument("--classical", action="store_true", help="add the binomial reference column")
    p.add_argument("--trajectory", action="store_true", help="walk: write spread per step instead of P(n)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", help="file (single runs) or directory (figure presets)")
    return p


def parse_args(argv: Sequence[str]) -> RunSpec:
    ns = build_parser().parse_args(list(argv))
    kw = vars(ns)
    if kw["steps"] is None:
        kw["steps"] = {"fig3": 100, "fig4": 20, "fig5": 100}.get(kw["command"], 200)
    if kw["command"] == "surface":
        kw["record_per_step"] = True
    return RunSpec(**kw).validate()


def _run_single(spec: RunSpec) -> str:
    out = io.StringIO()
    comments = spec.comments()
    cfg = spec.walk_config()
    if spec.command == "walk":
        if spec.trajectory:
            emit_trajectory(spread_series(cfg), out, comments)
        else:
            dist = distribution(evolve(cfg)[-1])
            ref = classical_reference(cfg.steps) if spec.classical and cfg.steps > 0 else None
            emit_distribution(dist, out, ref, comments)
    else:
        result = tau_scan(cfg, spec.grid, spec.record_per_step, workers=spec.threads)
        emit_scan(result, out, surface=spec.record_per_step, comments=comments)
    return out.getvalue()


FIG_TAUS = (("tau0", "0"), ("tauT5", "1/5"), ("tauT10", "1/10"), ("tauT2pi", TWO_PI_TOKEN))


def figure_runs(spec: RunSpec) -> list[tuple[str, RunSpec]]:
    """Expand a figure preset into ``(filename, RunSpec)`` pairs of plain commands."""
    base = dict(coin=spec.coin, coin_amplitudes=spec.coin_amplitudes, threads=spec.threads)
    n = spec.command
    if n in ("fig1", "fig2"):
        runs = []
        for name, tau in FIG_TAUS:
            rs = RunSpec("walk", model="harmonic", tau=tau, steps=spec.steps, origin=spec.origin,
                         classical=(n == "fig1"), trajectory=(n == "fig2"), **base)
            runs.append((f"{n}_{name}.csv", rs))
        return runs
    if n == "fig3":
        return [("fig3_scan.csv", RunSpec("scan", model="harmonic", steps=spec.steps, grid=spec.grid,
                                          origin=spec.origin, **base))]
    if n == "fig4":
        return [("fig4_surface.csv", RunSpec("surface", model="harmonic", steps=spec.steps, grid=spec.grid,
                                             origin=spec.origin, record_per_step=True, **base))]
    if n == "fig5":
        return [("fig5_scan.csv", RunSpec("scan", model="free", steps=spec.steps, grid=spec.grid,
                                          origin=spec.origin, **base))]
    raise UsageError("command", f"{n} is not a figure preset")


def run(spec: RunSpec) -> dict[str, str]:
    """Execute a validated spec; returns file name to CSV text (``"-"`` for single runs)."""
    if spec.command.startswith("fig"):
        return {name: _run_single(rs.validate()) for name, rs in figure_runs(spec)}
    return {"-": _run_single(spec)}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_args(argv)
        files = run(spec)
        # all computation done; single writer from here on
        if spec.command.startswith("fig"):
            outdir = Path(spec.output or spec.command)
            outdir.mkdir(parents=True, exist_ok=True)
            for name, text in files.items():
                (outdir / name).write_text(text, encoding="utf-8", newline="\n")
        elif spec.output:
            Path(spec.output).write_text(files["-"], encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(files["-"])
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {' '.join(str(exc).split())}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
