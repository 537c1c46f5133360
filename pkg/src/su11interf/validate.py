"""Self-check suite behind ``su11interf validate``.

Each check measures a residual and compares it against a fixed tolerance.
``fast`` keeps every truncation at or below 128; ``full`` runs the
acceptance grids.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import core, interferometer as ifm, sensitivity as sens, states, two_mode
from .core import BargmannIndex
from .interferometer import InterferometerConfig


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    observed: float
    passed: bool

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<58s} observed={self.observed:.3e}  tol={self.tolerance:.1e}"


@dataclass
class ValidationReport:
    level: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        out = [c.line() for c in self.checks]
        n_fail = sum(not c.passed for c in self.checks)
        out.append(f"{len(self.checks) - n_fail}/{len(self.checks)} checks passed "
                   f"({self.level}, {self.seconds:.1f} s)")
        return out


def _max(values: Iterable[float]) -> float:
    return max(values, default=0.0)


def _below(name: str, tol: float, observed: float) -> Check:
    return Check(name, tol, observed, bool(observed < tol))


def _above(name: str, floor: float, observed: float) -> Check:
    return Check(name, floor, observed, bool(observed > floor))


KS = [BargmannIndex(t) for t in (1, 2, 3, 5)]


def _structure_checks(full: bool) -> list[Check]:
    dims = (16, 64) if full else (16,)
    grid = list(itertools.product(KS, dims))
    herm = _max(
        float(np.max(np.abs(g.entries - g.entries.conj().T)))
        for k, d in grid for g in core.generators(k, d)[:2]
    )
    comm = _max(core.commutator_residual(k, d) for k, d in grid)
    cas = _max(
        float(np.max(np.abs(core.casimir_matrix(k, d).interior() - k.k * (k.k - 1) * np.eye(d - 1))))
        for k, d in grid
    )
    emb = _max(two_mode.irrep_embedding_check(n0, 12) for n0 in range(4))
    diff = _max(_max(two_mode.number_difference_commutators(n0, 12).values()) for n0 in range(4))
    return [
        _below("generators K1, K2 Hermitian", 1e-15, herm),
        _below("interior commutator residual", 1e-12, comm),
        _below("interior Casimir deviation from k(k-1)", 1e-12, cas),
        _below("two-mode embedding deviation (n0 = 0..3)", 1e-12, emb),
        _below("[N1 - N2, Ki] on two-mode space", 1e-12, diff),
    ]


def _state_checks(full: bool) -> list[Check]:
    real_zetas = (0.1, -0.1, 0.3, -0.3, 0.5, -0.5, 0.7)
    equality = _max(
        abs(states.uncertainty_slack(states.moments(states.coherent_state((k, z)))))
        for k in KS for z in real_zetas
    )
    slack = min(
        states.uncertainty_slack(states.moments(states.coherent_state((k, 0.3 * np.exp(1j * np.pi / 4)))))
        for k in KS
    )
    zetas = list(real_zetas) + [0.3j, 0.5 * np.exp(1j * 2.0), 0.7 * np.exp(-1j * 0.4)]
    closed = 0.0
    for k, z in itertools.product(KS, zetas):
        m = states.moments(states.coherent_state((k, z)))
        cf = states.coherent_closed_form_moments((k, z))
        closed = max(closed, abs(m.variances[1] - cf.var_k2), abs(m.variances[2] - cf.var_k3),
                     abs(m.mean[0] - cf.mean_k1))
    gammas = [(g, "+") for g in (0.5, 0.75, 1.0, 2.0)] + [(g, "-") for g in (-0.75, -2.0)]
    resid = 0.0
    round_trip = 0.0
    for (g, b), k in itertools.product(gammas, (BargmannIndex(1), BargmannIndex(4))):
        p, s = states.coherent_intelligent_state(g, b, k)
        resid = max(resid, states.intelligent_residual(s, p.gamma, p.lam))
        round_trip = max(round_trip, abs(states.gamma_from_state(s) - g))
    return [
        _below("uncertainty equality for real zeta", 1e-10, equality),
        _above("uncertainty slack for zeta = 0.3 exp(i pi/4)", 1e-6, slack),
        _below("closed-form coherent moments vs brute force", 1e-9, closed),
        _below("intelligent eigen-equation residual", 1e-8, resid),
        _below("gamma recovered from dK2/dK3", 1e-8, round_trip),
    ]


def _interferometer_checks(full: bool, flip: bool) -> list[Check]:
    rng = np.random.default_rng(0)
    draws = rng.uniform([-2, -np.pi], [2, np.pi], size=(100, 2))
    metric = _max(
        ifm.overall_transform(InterferometerConfig.from_phi(b, p)).metric_defect() for b, p in draws
    )
    row = _max(
        float(np.max(np.abs(ifm.overall_transform(InterferometerConfig.from_phi(b, p)).matrix[2]
                            - ifm.k3_out_coefficients(InterferometerConfig.from_phi(b, p))[0])))
        for b, p in draws
    )
    if full:
        grid = itertools.product((1, 2, 4), (0.0, 0.3, 0.5), (0.5, 1.0), (0.0, 0.3, 1.0))
        cap = states.DIM_CAP
    else:
        grid = itertools.product((1, 4), (0.0, 0.3), (0.5,), (0.3, 1.0))
        cap = 128
    first = second = 0.0
    for twice_k, z, beta, phi in grid:
        cfg = InterferometerConfig.from_phi(beta, phi)
        s = states.coherent_state((BargmannIndex(twice_k), z))
        out = states.moments(ifm.apply_interferometer(s, cfg, dim_cap=cap, flip_fwm_sign=flip))
        pred = ifm.overall_transform(cfg).apply(states.moments(s))
        first = max(first, float(np.max(np.abs(out.mean - pred.mean))))
        second = max(second, float(np.max(np.abs(out.second - pred.second))))
    return [
        _below("SO(2,1) metric preservation", 1e-12, metric),
        _below("K3_out row of overall transform", 1e-12, row),
        _below("Heisenberg/Schrodinger first moments", 1e-7, first),
        _below("Heisenberg/Schrodinger second moments", 1e-6, second),
    ]


def _sensitivity_checks(full: bool, flip: bool) -> list[Check]:
    betas = (0.5, 1.0, 2.0) if full else (0.5, 1.0)
    cap = states.DIM_CAP if full else 128
    vac = BargmannIndex(1)
    vacuum_err = 0.0
    for beta, phi in itertools.product(betas, (0.05, 0.3, 1.0, math.pi / 2)):
        num = sens.delta_phi_evolved(states.vacuum(vac), InterferometerConfig.from_phi(beta, phi),
                                     dim_cap=cap, flip_fwm_sign=flip)
        ref = sens.delta_phi_vacuum(beta, phi)
        vacuum_err = max(vacuum_err, abs(num.delta_phi_sq / ref.delta_phi_sq - 1))
    ks = (1, 2, 6, 12) if full else (1, 6)
    chain = 0.0
    for twice_k, z, beta in itertools.product(ks, (0.0, 0.2, 0.5), (0.5, 1.0)):
        k = BargmannIndex(twice_k)
        m = states.moments(states.coherent_state((k, z)))
        num = sens.delta_phi_numeric(m, InterferometerConfig.from_phi(beta, 1e-3))
        ref = sens.delta_phi_coherent_intelligent(k, beta)
        chain = max(chain, abs(num.delta_phi_sq / ref.delta_phi_sq - 1))
    budget = 0.0
    for twice_k, z, beta in itertools.product((1, 2, 3, 6), (0.0, 0.3, 0.6), (0.3, 1.0, 2.0)):
        k = BargmannIndex(twice_k)
        n = ifm.total_photons((k, z), beta)
        a = sens.delta_phi_vs_photons(k, z, n).delta_phi_sq
        b = sens.delta_phi_coherent_intelligent(k, beta).delta_phi_sq
        budget = max(budget, abs(a / b - 1))
    return [
        _below("vacuum: evolved pipeline vs closed form (rel)", 1e-6, vacuum_err),
        _below("intersection states at phi=1e-3 vs 1/(2k sinh^2) (rel)", 1e-4, chain),
        _below("photon-budget round trip (rel)", 1e-10, budget),
    ]



def run_validate(level: str = "fast", flip_fwm_sign: bool = False) -> ValidationReport:
    """Run every invariant check; ``flip_fwm_sign`` deliberately breaks the mixer convention."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    full = level == "full"
    start = time.perf_counter()
    report = ValidationReport(level)
    report.checks += _structure_checks(full)
    report.checks += _state_checks(full)
    report.checks += _interferometer_checks(full, flip_fwm_sign)
    report.checks += _sensitivity_checks(full, flip_fwm_sign)
    report.seconds = time.perf_counter() - start
    return report
