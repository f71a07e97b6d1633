"""Delay bounds when direct and reflected paths are not separated.

Each of P looks contains the sum of the signal and its delayed copy in real
noise, and only the delay plus the M signal samples are estimated. The FIM
bordering structure depends on how far the copies overlap: disjoint support
gives a diagonal nuisance block, total overlap (zero delay) makes the delay
unidentifiable, and partial overlap couples samples n and n - n0. For
overlap of at most half the support (2*n0 >= M) the nuisance block inverts
in closed form; deeper overlaps are eliminated numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fim import (METHOD_CLOSED_FORM, METHOD_SCHUR_NUMERIC, CrbReport,
                  SingularFimError, SINGULAR_COND)
from .signals import SampledSignal, Scenario, triangle_wave

SINGULAR_RTOL = 1e-10


@dataclass(frozen=True)
class OverlapFim:
    """Bordered FIM (e, b, D) for (tau0, s(0), ..., s((M-1)delta))."""

    e: float
    b_vec: np.ndarray
    d_mat: np.ndarray
    n0: int
    regime: str
    deriv: np.ndarray
    sigma_w2: float
    looks: int

    @property
    def m(self) -> int:
        return self.b_vec.size


def overlap_regime(n0: int, m: int) -> str:
    if n0 > m - 1:
        return "none"
    if n0 == 0:
        return "total"
    return "partial"


def fim_overlap(sig: SampledSignal, n0: int, sc: Scenario) -> OverlapFim:
    """Assemble the real-noise FIM blocks for overlap offset n0.

    e = (P/sigma_w2) sum s'(n*delta)^2 always. Outside overlap the coupling
    is b_j = -(P/sigma_w2) s' and D = (2P/sigma_w2) I; at total overlap both
    double; partial overlap adds s'((n-n0)*delta) to b on n >= n0 and a
    P/sigma_w2 band at offset n0 in D.
    """
    if not sig.is_real:
        raise ValueError("nonseparated-path analysis is for real signals")
    if sc.looks_reflected < 1:
        raise ValueError("need at least one look")
    if n0 < 0:
        raise ValueError("n0 must be nonnegative")
    p = sc.looks_reflected
    s2 = sc.sigma_w2
    d = sig.deriv.real.copy()
    m = sig.m
    regime = overlap_regime(n0, m)
    e = p / s2 * float(np.sum(d ** 2))
    if regime == "none":
        b = -(p / s2) * d
        d_mat = (2.0 * p / s2) * np.eye(m)
    elif regime == "total":
        b = -(2.0 * p / s2) * d
        d_mat = (4.0 * p / s2) * np.eye(m)
    else:
        b = -(p / s2) * d.copy()
        b[n0:] += -(p / s2) * d[: m - n0]
        d_mat = (2.0 * p / s2) * np.eye(m)
        for n in range(n0, m):
            d_mat[n, n - n0] = p / s2
            d_mat[n - n0, n] = p / s2
    return OverlapFim(e=e, b_vec=b, d_mat=d_mat, n0=n0, regime=regime,
                      deriv=d, sigma_w2=s2, looks=p)


def _closed_form_partial(of: OverlapFim) -> float | None:
    """Closed-form CRB for overlap of at most half the support (2*n0 >= M).

    (sigma_w2/P) / [ 1/3 sum_{n=n0}^{M-1} (s'(n d) - s'((n-n0) d))^2
                   + 1/2 sum_{n=M-n0}^{n0-1} s'(n d)^2 ].
    """
    m, n0 = of.m, of.n0
    if 2 * of.n0 < m:
        return None
    d = of.deriv
    den = float(np.sum((d[n0:] - d[: m - n0]) ** 2)) / 3.0
    den += float(np.sum(d[m - n0: n0] ** 2)) / 2.0
    if den <= 0.0:
        return None
    return of.sigma_w2 / of.looks / den


def crb_overlap(of: OverlapFim, scenario: dict | None = None) -> CrbReport:
    """Delay bound after eliminating the signal samples.

    No overlap has the closed form (2P/P^2) sigma_w2 / sum s'^2; total
    overlap makes e - b^T D^{-1} b exactly zero (no finite bound exists);
    partial overlap is eliminated numerically, with the closed form attached
    and preferred when 2*n0 >= M.
    """
    scenario = scenario or {}
    if np.linalg.cond(of.d_mat) > SINGULAR_COND:
        raise SingularFimError("sample block of the overlap FIM is singular")
    x = of.e - float(of.b_vec @ scipy.linalg.solve(of.d_mat, of.b_vec, assume_a="sym"))
    details = {"regime": of.regime, "n0": of.n0,
               "information_after_elimination": x}
    if abs(x) <= SINGULAR_RTOL * max(of.e, 1e-300):
        return CrbReport(values={"tau0": float("inf")},
                         method=METHOD_SCHUR_NUMERIC, singular=True,
                         scenario=scenario,
                         details={**details, "note": "overlap leaves no delay information"})
    numeric = 1.0 / x
    if of.regime == "none":
        value = 2.0 * of.sigma_w2 / (of.looks * float(np.sum(of.deriv ** 2)))
        return CrbReport(values={"tau0": value}, method=METHOD_CLOSED_FORM,
                         scenario=scenario,
                         details={**details, "tau0_numeric": numeric})
    closed = _closed_form_partial(of)
    if closed is not None:
        return CrbReport(values={"tau0": closed}, method=METHOD_CLOSED_FORM,
                         scenario=scenario,
                         details={**details, "tau0_numeric": numeric})
    return CrbReport(values={"tau0": numeric}, method=METHOD_SCHUR_NUMERIC,
                     scenario=scenario, details=details)


def triangle_overlap_curve(m: int, sc: Scenario) -> list[dict]:
    """Delay bound versus overlap offset for the slope +-1 triangle wave.

    Emits one row per n0 = 0..M (n0 = M is the first disjoint offset),
    carrying the bound or a singularity marker, the formula path, and the
    disjoint-support reference value (sigma_w2/P) * 2/M.
    """
    sig = triangle_wave(m)
    reference = 2.0 * sc.sigma_w2 / (sc.looks_reflected * m)
    rows = []
    for n0 in range(m + 1):
        report = crb_overlap(fim_overlap(sig, n0, sc))
        rows.append({
            "n0": n0,
            "crb_tau0": None if report.singular else report.values["tau0"],
            "singular": report.singular,
            "method": report.method,
            "regime": report.details["regime"],
            "crb_non": reference,
        })
    return rows
