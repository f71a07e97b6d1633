"""Covariance-form FIM for correlated clutter-plus-noise.

All L+P looks are stacked into one long observation vector whose covariance
C = s s^H + Sigma_cn embeds the deterministic signal stack as a rank-one
term. The FIM follows the covariance-derivative rule
I_ij = Tr(C^{-1} dC/dtheta_i C^{-1} dC/dtheta_j), implemented twice: once as
written and once through vectorized derivatives and a Kronecker product, as
independent cross-checking paths. This is a different statistical model from
the deterministic-mean bounds elsewhere in the package and is reported as
such; the two are not expected to coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import unknown_signal_labels
from .fim import SINGULAR_COND, CrbReport, FimMatrix, METHOD_SCHUR_NUMERIC
from .signals import SampledSignal, Scenario, mean_vector

HERMITIAN_RTOL = 1e-12
PSD_RTOL = 1e-10
EIG_FLOOR = 1e-12


def _check_hermitian_psd(mat: np.ndarray, name: str) -> None:
    scale = float(np.max(np.abs(mat))) if mat.size else 0.0
    if float(np.max(np.abs(mat - mat.conj().T))) > HERMITIAN_RTOL * max(scale, 1e-300):
        raise ValueError(f"{name} must be Hermitian")
    eigmin = float(np.min(np.linalg.eigvalsh(mat)))
    if eigmin < -PSD_RTOL * max(scale, 1e-300):
        raise ValueError(f"{name} must be positive semidefinite")


@dataclass(frozen=True)
class StackedModel:
    """Stacked observation stack: L direct copies then P reflected copies."""

    s_stack: np.ndarray
    sigma_cn: np.ndarray
    c: np.ndarray
    n: int
    looks_direct: int
    looks_reflected: int

    @property
    def dim(self) -> int:
        return self.s_stack.size


def build_stacked(sig: SampledSignal, sc: Scenario, sigma_cn: np.ndarray) -> StackedModel:
    """Stack the look means and form C = s s^H + Sigma_cn."""
    n = sc.record_samples(sig)
    looks = sc.looks_direct + sc.looks_reflected
    sigma_cn = np.asarray(sigma_cn, dtype=complex)
    if sigma_cn.shape != (n * looks, n * looks):
        raise ValueError(
            f"Sigma_cn must be {n * looks} x {n * looks} for N={n}, L+P={looks}")
    _check_hermitian_psd(sigma_cn, "Sigma_cn")
    direct = mean_vector(sig, sc, "direct")
    reflected = mean_vector(sig, sc, "reflected")
    s_stack = np.concatenate([direct] * sc.looks_direct
                             + [reflected] * sc.looks_reflected)
    c = np.outer(s_stack, s_stack.conj()) + sigma_cn
    return StackedModel(s_stack=s_stack, sigma_cn=sigma_cn, c=c, n=n,
                        looks_direct=sc.looks_direct,
                        looks_reflected=sc.looks_reflected)


def stack_gradient(model: StackedModel, sig: SampledSignal, sc: Scenario,
                   label: str) -> np.ndarray:
    """Derivative of the signal stack with respect to one parameter.

    tau0 differentiates the sampled delay through the analytic signal
    derivative (with the Doppler phase), f0 brings down j*2*pi*n*delta on the
    reflected blocks, and each sample parameter is an indicator pattern
    replicated across looks (phase-rotated on the reflected path).
    """
    n0 = sc.delay_samples(sig.delta)
    n = model.n
    idx = np.arange(n0, n0 + sig.m)
    phase = np.exp(2j * np.pi * sc.f0 * idx * sig.delta)
    d_direct = np.zeros(n, dtype=complex)
    d_reflected = np.zeros(n, dtype=complex)
    if label == "tau0":
        d_reflected[idx] = -sc.scale * sig.deriv * phase
    elif label == "f0":
        d_reflected[idx] = (2j * np.pi * idx * sig.delta
                            * sc.scale * sig.samples * phase)
    elif label.startswith(("sR_", "sI_")):
        k = int(label.split("_", 1)[1])
        if not 0 <= k < sig.m:
            raise ValueError(f"sample index out of range in {label!r}")
        unit = 1.0 if label.startswith("sR_") else 1.0j
        d_direct[k] = unit
        d_reflected[n0 + k] = sc.scale * unit * phase[k]
    else:
        raise ValueError(f"unknown parameter {label!r}")
    return np.concatenate([d_direct] * model.looks_direct
                          + [d_reflected] * model.looks_reflected)


def dc_dtheta(model: StackedModel, sig: SampledSignal, sc: Scenario,
              param_index: int) -> np.ndarray:
    """dC/dtheta_i = (ds/dtheta_i) s^H + s (ds/dtheta_i)^H, Hermitian."""
    labels = unknown_signal_labels(sig.m)
    if not 0 <= param_index < len(labels):
        raise ValueError(f"param_index {param_index} out of range")
    ds = stack_gradient(model, sig, sc, labels[param_index])
    return np.outer(ds, model.s_stack.conj()) + np.outer(model.s_stack, ds.conj())


def dc_list(model: StackedModel, sig: SampledSignal, sc: Scenario) -> list[np.ndarray]:
    """Covariance derivatives for the full (tau0, f0, samples) vector."""
    return [dc_dtheta(model, sig, sc, i)
            for i in range(len(unknown_signal_labels(sig.m)))]


def _realize(fim: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(fim.real))) if fim.size else 0.0
    resid = float(np.max(np.abs(fim.imag))) if fim.size else 0.0
    if resid > 1e-10 * max(scale, 1.0):
        raise ValueError(f"FIM imaginary residue too large: {resid:.3e}")
    out = fim.real
    return 0.5 * (out + out.T)


def fim_trace_form(model: StackedModel, dc: list[np.ndarray],
                   labels: tuple[str, ...] | None = None) -> FimMatrix:
    """I_ij = Tr(C^{-1} dC_i C^{-1} dC_j)."""
    try:
        np.linalg.cholesky(model.c)
    except np.linalg.LinAlgError as exc:
        raise ValueError("C is not positive definite") from exc
    x = [np.linalg.solve(model.c, d) for d in dc]
    p = len(dc)
    fim = np.empty((p, p), dtype=complex)
    for i in range(p):
        for j in range(i, p):
            fim[i, j] = np.einsum("ij,ji->", x[i], x[j])
            fim[j, i] = fim[i, j].conjugate()
    if labels is None:
        labels = tuple(f"theta_{i}" for i in range(p))
    return FimMatrix(_realize(fim), labels)


def fim_kron_form(model: StackedModel, dc: list[np.ndarray],
                  labels: tuple[str, ...] | None = None) -> FimMatrix:
    """I_ij = vec(dC_i)^H (conj(C)^{-1} kron C^{-1}) vec(dC_j).

    Independent of the trace path: explicit inverse, column-major
    vectorization, one dense Kronecker product.
    """
    c_inv = np.linalg.inv(model.c)
    kron = np.kron(c_inv.conj(), c_inv)
    vecs = np.column_stack([d.flatten(order="F") for d in dc])
    fim = vecs.conj().T @ kron @ vecs
    if labels is None:
        labels = tuple(f"theta_{i}" for i in range(len(dc)))
    return FimMatrix(_realize(fim), labels)


def inv_sqrt(mat: np.ndarray) -> np.ndarray:
    """Hermitian inverse square root with eigenvalue floor 1e-12 * lambda_max."""
    lam, vec = np.linalg.eigh(mat)
    lam = np.maximum(lam, EIG_FLOOR * float(lam[-1]))
    return (vec * lam ** -0.5) @ vec.conj().T


def j_factors(model: StackedModel, dc: list[np.ndarray]) -> np.ndarray:
    """Columns J_i = (conj(C^{-1/2}) kron C^{-1/2}) vec(dC_i).

    The FIM factors as I_ij = J_i^H J_j.
    """
    c_mhalf = inv_sqrt(model.c)
    factor = np.kron(c_mhalf.conj(), c_mhalf)
    return factor @ np.column_stack([d.flatten(order="F") for d in dc])


def crb_correlated(model: StackedModel, dc: list[np.ndarray],
                   labels: tuple[str, ...] | None = None,
                   scenario: dict | None = None) -> CrbReport:
    """Delay/Doppler diagonal of the inverted covariance-model FIM.

    The full parameter vector (tau0, f0, all samples) is eliminated jointly.
    Because C = s s^H + Sigma_cn is blind to a common phase rotation of the
    signal stack, this FIM always carries a gauge null direction along
    (-s_I, s_R); null directions confined to the sample parameters are
    projected out, while any null direction touching (tau0, f0) means the
    delay/Doppler pair itself is not identifiable and the report is flagged
    singular (e.g. no direct-path look: delay trades off against signal
    timing exactly).
    """
    fim = fim_trace_form(model, dc, labels)
    lam, vec = np.linalg.eigh(fim.entries)
    lam_max = float(lam[-1]) if lam.size else 0.0
    null = lam <= lam_max / SINGULAR_COND
    details = {"model": "covariance", "null_directions": int(np.sum(null))}
    if np.any(np.abs(vec[:2, null]) > 1e-6):
        return CrbReport(values={"tau0": float("inf"), "f0": float("inf")},
                         method=METHOD_SCHUR_NUMERIC, singular=True,
                         scenario=scenario or {},
                         details={**details,
                                  "note": "delay/Doppler not identifiable in this model"})
    keep = ~null
    inv = (vec[:, keep] / lam[keep]) @ vec[:, keep].T
    return CrbReport(values={"tau0": float(inv[0, 0]), "f0": float(inv[1, 1])},
                     method=METHOD_SCHUR_NUMERIC, scenario=scenario or {},
                     details=details)
