"""Command-line interface: parameter sweeps and the self-check suite.

Angles are in radians and the mixer gain ``beta`` is dimensionless.
Ranges are written ``START[:STOP:COUNT]``; a single number is a one-point
range.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import interferometer as ifm, sensitivity as sens, states
from .core import BargmannIndex
from .errors import IndeterminatePoint, SU11Error
from .interferometer import InterferometerConfig
from .validate import run_validate

MODES = ("phi_sweep", "beta_sweep", "k_sweep", "photon_budget")
INPUTS = ("vacuum", "coherent", "coherent_intelligent", "fock")
ZETA_MAX = 0.95


@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    count: int = 1

    @classmethod
    def parse(cls, text: str) -> "Range":
        parts = text.split(":")
        try:
            if len(parts) == 1:
                return cls(float(parts[0]), float(parts[0]), 1)
            if len(parts) == 3:
                return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            pass
        raise argparse.ArgumentTypeError(f"expected START or START:STOP:COUNT, got {text!r}")

    @classmethod
    def single(cls, value: float) -> "Range":
        return cls(value, value, 1)

    def values(self) -> list[float]:
        if self.count < 1:
            raise ValueError(f"range count must be >= 1, got {self.count}")
        if self.count == 1:
            return [self.start]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


@dataclass(frozen=True)
class SweepConfig:
    mode: str = "beta_sweep"
    beta: Range = Range.single(1.0)
    phi: Range = Range.single(0.0)
    twice_k: Range = Range.single(1)
    zeta: Range = Range.single(0.0)
    n_total: Range = Range.single(1.0)
    input_kind: str = "coherent_intelligent"
    output_format: str = "csv"
    numeric_check: bool = False
    dim_cap: int = states.DIM_CAP

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.input_kind not in INPUTS:
            raise ValueError(f"input must be one of {INPUTS}, got {self.input_kind!r}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.output_format!r}")
        for name in ("beta", "phi", "twice_k", "zeta", "n_total"):
            getattr(self, name).values()
        if any(not 0 <= z <= ZETA_MAX for z in self.zeta.values()):
            raise ValueError(f"zeta must lie in [0, {ZETA_MAX}]")
        if any(t < 1 or t != int(t) for t in self.twice_k.values()):
            raise ValueError("twice_k values must be integers >= 1")
        if self.input_kind in ("vacuum", "fock") and any(self.zeta.values()):
            raise ValueError(f"{self.input_kind} input has zeta = 0")
        if self.input_kind == "vacuum" and self.twice_k.values() != [1]:
            raise ValueError("vacuum input has twice_k = 1")

    def axes(self) -> list[tuple[str, list[float]]]:
        """Grid axes in row order; the swept axis varies slowest."""
        if self.mode == "photon_budget":
            names = ["n_total", "twice_k", "zeta"]
        else:
            lead = {"phi_sweep": "phi", "beta_sweep": "beta", "k_sweep": "twice_k"}[self.mode]
            names = [lead] + [n for n in ("twice_k", "zeta", "beta", "phi") if n != lead]
        return [(n, getattr(self, n).values()) for n in names]


COLUMNS = ("mode", "input", "twice_k", "zeta", "beta", "phi", "n_total",
           "delta_phi_sq_closed", "delta_phi_sq_numeric", "discrepancy", "status")


@dataclass
class SweepRow:
    mode: str
    input: str
    twice_k: int
    zeta: float
    beta: float | None
    phi: float | None
    n_total: float | None = None
    delta_phi_sq_closed: float | None = None
    delta_phi_sq_numeric: float | None = None
    discrepancy: float | None = None
    status: str = "ok"
    _errors: list[str] = field(default_factory=list, repr=False)

    def flag(self, exc: Exception):
        self._errors.append(type(exc).__name__)
        self.status = ";".join(self._errors)

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("_errors")
        return d


def _input_state(kind: str, k: BargmannIndex, zeta: float, dim_cap: int):
    if kind in ("vacuum", "fock"):
        return states.fock_state(k, 0, states.MIN_DIM)
    return states.coherent_state((k, zeta), dim_cap=dim_cap)


def _closed_form(kind: str, k: BargmannIndex, zeta: float, beta: float, phi: float):
    if kind == "vacuum":
        return sens.delta_phi_vacuum(beta, phi).delta_phi_sq
    if kind == "fock":
        return sens.delta_phi_lowest_weight(k, beta, phi).delta_phi_sq
    if phi != 0:
        return None
    if kind == "coherent_intelligent":
        return sens.delta_phi_coherent_intelligent(k, beta).delta_phi_sq
    # general coherent input at phi = 0: (dK3)^2 / (sinh^2 beta <K1>^2)
    cf = states.coherent_closed_form_moments((k, zeta))
    if cf.mean_k1 == 0:
        raise IndeterminatePoint("<K1> = 0: no phase signal at phi = 0")
    return cf.var_k3 / (math.sinh(beta) ** 2 * cf.mean_k1**2)


def _numeric(state, beta: float, phi: float, dim_cap: int) -> float:
    if phi == 0:
        return sens.extrapolate_phi_to_zero(
            lambda x: sens.delta_phi_evolved(
                state, InterferometerConfig.from_phi(beta, x), dim_cap=dim_cap).delta_phi_sq)
    return sens.delta_phi_evolved(state, InterferometerConfig.from_phi(beta, phi),
                                  dim_cap=dim_cap).delta_phi_sq


def _evaluate(cfg: SweepConfig, point: dict) -> SweepRow:
    twice_k = int(point["twice_k"])
    k = BargmannIndex(twice_k)
    zeta = point["zeta"]
    kind = cfg.input_kind
    if cfg.mode == "photon_budget":
        n_total = point["n_total"]
        row = SweepRow(cfg.mode, kind, twice_k, zeta, None, 0.0, n_total)
        try:
            row.delta_phi_sq_closed = sens.delta_phi_vs_photons(k, zeta, n_total).delta_phi_sq
            row.beta = math.acosh(sens.photon_budget_gain(k, zeta, n_total))
        except SU11Error as exc:
            row.flag(exc)
            return row
    else:
        beta, phi = point["beta"], point["phi"]
        row = SweepRow(cfg.mode, kind, twice_k, zeta, beta, phi)
        row.n_total = ifm.total_photons((k, zeta), beta)
        try:
            row.delta_phi_sq_closed = _closed_form(kind, k, zeta, beta, phi)
        except SU11Error as exc:
            row.flag(exc)
    if cfg.numeric_check or row.delta_phi_sq_closed is None:
        try:
            state = _input_state(kind, k, zeta, cfg.dim_cap)
            row.delta_phi_sq_numeric = _numeric(state, row.beta, row.phi, cfg.dim_cap)
        except SU11Error as exc:
            row.flag(exc)
    if row.delta_phi_sq_closed is not None and row.delta_phi_sq_numeric is not None:
        row.discrepancy = abs(row.delta_phi_sq_closed - row.delta_phi_sq_numeric) / row.delta_phi_sq_closed
    return row


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in lexicographic grid order."""
    axes = cfg.axes()
    names = [n for n, _ in axes]
    points = [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in axes))]
    for p in points:
        p.setdefault("beta", None)
        p.setdefault("phi", 0.0)
        p.setdefault("n_total", None)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(lambda p: _evaluate(cfg, p), points))
    return [_evaluate(cfg, p) for p in points]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def format_rows(rows: Sequence[SweepRow], output_format: str) -> str:
    if output_format == "json":
        return json.dumps([r.as_dict() for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        d = r.as_dict()
        writer.writerow([_fmt(d[c]) for c in COLUMNS])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="su11interf",
        description="Phase sensitivity of an SU(1,1) interferometer. "
                    "Angles in radians; beta (mixer gain) is dimensionless.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="tabulate (dphi)^2 over a parameter grid")
    sw.add_argument("--mode", choices=MODES, default="beta_sweep")
    sw.add_argument("--beta", type=Range.parse, default=Range.single(1.0),
                    help="mixer gain range, START[:STOP:COUNT]")
    sw.add_argument("--phi", type=Range.parse, default=None,
                    help="net phase range in radians (0 means the phi -> 0 limit)")
    sw.add_argument("--phi1", type=float, default=None, help="phase of arm 1 (radians)")
    sw.add_argument("--phi2", type=float, default=None, help="phase of arm 2 (radians)")
    sw.add_argument("--twice-k", type=Range.parse, default=Range.single(1),
                    help="twice the Bargmann index, 2k = n0 + 1")
    sw.add_argument("--zeta", type=Range.parse, default=Range.single(0.0),
                    help="real coherent amplitude in [0, 0.95]")
    sw.add_argument("--n-total", type=Range.parse, default=Range.single(1.0),
                    help="photon budget N (photon_budget mode)")
    sw.add_argument("--input", dest="input_kind", choices=INPUTS, default="coherent_intelligent")
    sw.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    sw.add_argument("--numeric-check", action="store_true",
                    help="also run the truncated Fock-space route")
    sw.add_argument("--out", default=None, help="write to this file instead of stdout")
    sw.add_argument("--dim-cap", type=int, default=states.DIM_CAP,
                    help="largest truncation used by the numeric route")
    sw.add_argument("--jobs", type=int, default=1, help="evaluate grid points in parallel")

    va = sub.add_parser("validate", help="run the invariant checks")
    va.add_argument("--level", choices=("fast", "full"), default="fast")
    va.add_argument("--debug-flip-fwm-sign", action="store_true", help=argparse.SUPPRESS)
    return parser


def _phi_range(args) -> Range:
    pair = args.phi1 is not None or args.phi2 is not None
    if args.phi is not None and pair:
        raise ValueError("give either --phi or --phi1/--phi2, not both")
    if pair:
        return Range.single(InterferometerConfig(0.0, args.phi1 or 0.0, args.phi2 or 0.0).phi)
    return args.phi if args.phi is not None else Range.single(0.0)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate":
        report = run_validate(args.level, flip_fwm_sign=args.debug_flip_fwm_sign)
        print("\n".join(report.lines()))
        return 0 if report.passed else 1

    try:
        cfg = SweepConfig(
            mode=args.mode, beta=args.beta, phi=_phi_range(args), twice_k=args.twice_k,
            zeta=args.zeta, n_total=args.n_total, input_kind=args.input_kind,
            output_format=args.output_format, numeric_check=args.numeric_check,
            dim_cap=args.dim_cap,
        )
    except ValueError as exc:
        parser.error(str(exc))
    text = format_rows(run_sweep(cfg, jobs=args.jobs), cfg.output_format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
