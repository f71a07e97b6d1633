"""Core delay/Doppler bounds: known signal and totally unknown signal.

The known-signal case reduces to a 2x2 information matrix in (tau0, f0).
When the transmitted signal is unknown, its real and imaginary samples are
appended as 2M nuisance parameters estimated from L direct-path and P
reflected-path looks; eliminating them multiplies both known-signal bounds
by the look-count factor (L+P)/(L*P).
"""

from __future__ import annotations

import numpy as np

from .fim import BoundPair, FimMatrix
from .signals import SampledSignal, Scenario, eta

TWO_PI2 = 8.0 * np.pi ** 2
# Cauchy-Schwarz determinants this far below their natural scale are treated
# as exactly zero (rank-deficient FIM, no finite bound)
DEGENERACY_RTOL = 1e-12


def weighted_sums(sig: SampledSignal, tau0: float) -> tuple[float, float, float]:
    """(sum |ds/dt|^2, sum (t+tau0)^2 |s|^2, eta) over the sample grid."""
    w = sig.times + tau0
    s_dd = float(np.sum(np.abs(sig.deriv) ** 2))
    s_ww = float(np.sum(w ** 2 * np.abs(sig.samples) ** 2))
    return s_dd, s_ww, eta(sig, tau0)


def look_factor(sc: Scenario) -> float | None:
    """(L+P)/(L*P), or None when either look count is zero."""
    l, p = sc.looks_direct, sc.looks_reflected
    if l == 0 or p == 0:
        return None
    return (l + p) / (l * p)


def fim_known_signal(sig: SampledSignal, sc: Scenario) -> FimMatrix:
    """2x2 information matrix for (tau0, f0) with the signal known, one look.

    I11 = (2/sigma_w2) sum |ds/dt|^2,
    I22 = (8 pi^2/sigma_w2) sum (t+tau0)^2 |s|^2,
    I12 = (4 pi/sigma_w2) eta.
    """
    s_dd, s_ww, e = weighted_sums(sig, sc.tau0)
    s2 = sc.sigma_w2
    entries = np.array([
        [2.0 * s_dd / s2, 4.0 * np.pi * e / s2],
        [4.0 * np.pi * e / s2, TWO_PI2 * s_ww / s2],
    ])
    return FimMatrix(entries, ("tau0", "f0"))


def jcrb_known(sig: SampledSignal, sc: Scenario) -> BoundPair:
    """Joint delay/Doppler bounds for a known signal (single look).

    Singular when the derivative energy vanishes or the Cauchy-Schwarz
    denominator sum|s'|^2 * sum(t+tau0)^2|s|^2 - eta^2 is not positive.
    """
    s_dd, s_ww, e = weighted_sums(sig, sc.tau0)
    den = s_dd * s_ww - e * e
    if den <= DEGENERACY_RTOL * s_dd * s_ww or s_dd <= 0.0:
        return BoundPair.singular_pair("degenerate signal: zero information determinant")
    return BoundPair(tau0=sc.sigma_w2 * s_ww / (2.0 * den),
                     f0=sc.sigma_w2 * s_dd / (TWO_PI2 * den))


def unknown_signal_labels(m: int) -> tuple[str, ...]:
    labels = ["tau0", "f0"]
    for k in range(m):
        labels += [f"sR_{k}", f"sI_{k}"]
    return tuple(labels)


def unknown_signal_blocks(sig: SampledSignal, sc: Scenario):
    """A, B, C blocks of the unknown-signal FIM (reflected scale a = 1)."""
    p, l = sc.looks_reflected, sc.looks_direct
    s2 = sc.sigma_w2
    a_block = fim_known_signal(sig, sc).entries * p
    w = sig.times + sc.tau0
    b_block = np.empty((2, 2 * sig.m))
    b_block[0, 0::2] = -(2.0 * p / s2) * sig.deriv.real
    b_block[0, 1::2] = -(2.0 * p / s2) * sig.deriv.imag
    b_block[1, 0::2] = -(4.0 * np.pi * p / s2) * w * sig.samples.imag
    b_block[1, 1::2] = (4.0 * np.pi * p / s2) * w * sig.samples.real
    c_block = np.eye(2 * sig.m) * (2.0 * l + 2.0 * p) / s2
    return a_block, b_block, c_block


def fim_unknown_signal(sig: SampledSignal, sc: Scenario) -> FimMatrix:
    """(2+2M)x(2+2M) FIM for (tau0, f0, sR_0, sI_0, ..., sI_{M-1})."""
    if sc.scale != 1.0:
        raise ValueError("reflected-path scale must be 1 here; see ddcrb.scaled")
    a_block, b_block, c_block = unknown_signal_blocks(sig, sc)
    m2 = 2 * sig.m
    entries = np.zeros((2 + m2, 2 + m2))
    entries[:2, :2] = a_block
    entries[:2, 2:] = b_block
    entries[2:, :2] = b_block.T
    entries[2:, 2:] = c_block
    return FimMatrix(entries, unknown_signal_labels(sig.m))


def jcrb_unknown(sig: SampledSignal, sc: Scenario) -> BoundPair:
    """Joint bounds with the signal unknown: (L+P)/(L*P) times jcrb_known.

    L = 0 or P = 0 leaves the delay/Doppler block of the FIM with no
    invertible Schur complement, so no unbiased joint estimator exists and
    the pair is flagged singular.
    """
    factor = look_factor(sc)
    if factor is None:
        return BoundPair.singular_pair("L = 0 or P = 0: no unbiased joint estimator")
    return jcrb_known(sig, sc).scaled(factor)


def crb_separate_unknown(sig: SampledSignal, sc: Scenario) -> BoundPair:
    """Bounds when tau0 and f0 are estimated separately, signal unknown.

    tau0: (L+P)/(L*P) * sigma_w2 / (2 sum|s'|^2);
    f0:   (L+P)/(L*P) * sigma_w2 / (8 pi^2 sum (t+tau0)^2 |s|^2).
    """
    factor = look_factor(sc)
    if factor is None:
        return BoundPair.singular_pair("L = 0 or P = 0: no unbiased estimator")
    s_dd, s_ww, _ = weighted_sums(sig, sc.tau0)
    if s_dd <= 0.0 or s_ww <= 0.0:
        return BoundPair.singular_pair("degenerate signal: zero information")
    return BoundPair(tau0=factor * sc.sigma_w2 / (2.0 * s_dd),
                     f0=factor * sc.sigma_w2 / (TWO_PI2 * s_ww))
