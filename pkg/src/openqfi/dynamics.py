"""Lindblad generators, Liouville-space vectorization and time evolution.

Vectorization convention
------------------------
Operators are stacked row by row: ``vec(rho)[i*d + j] = rho[i, j]``. With
this ordering ``vec(X rho Y) = (X kron Y^T) vec(rho)`` and the vectorized
pure state is ``vec(|psi><psi|) = |psi> kron |psi*>``. Every superoperator
in the package is built in this convention.
"""

from dataclasses import dataclass, field
import warnings

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonMarkovianWarning,
    NotHermitianError,
    NotSquareLengthError,
    ToleranceNotMetError,
)
from .linalg import HERMITIAN_TOL, as_matrix, dag, expm, kron

TRACE_TOL = 1e-10
PSD_TOL = 1e-9


def check_density_matrix(rho, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
    """Validate ``rho`` as a density matrix and return it as a complex array."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"density matrix must be square, got {rho.shape}")
    dev = np.max(np.abs(rho - dag(rho)))
    if dev > herm_tol:
        raise NotHermitianError(f"density matrix deviates from Hermitian by {dev:.3g}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix has trace {tr!r}")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))[0]
    if lam_min < -psd_tol:
        raise ValueError(f"density matrix has negative eigenvalue {lam_min:.3g}")
    return rho


def pure_state(psi):
    """Projector onto the normalized ket ``psi``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def purity(rho):
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho) ** 2))


def trace_distance(rho, sigma):
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + dag(diff))
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


@dataclass(frozen=True)
class RateProfile:
    """Time dependence of a dissipation rate.

    Either a constant, or samples ``(times, values)`` linearly interpolated
    and held constant outside the sampled window. Negative values are allowed
    (non-Markovian intervals) but trigger ``NonMarkovianWarning`` on
    evolution.
    """

    kind: str
    value: float = 0.0
    times: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "constant":
            if not np.isfinite(self.value):
                raise ValueError("rate must be finite")
        elif self.kind == "sampled":
            t = np.asarray(self.times, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if t.ndim != 1 or t.shape != v.shape or t.size < 1:
                raise ValueError("sampled rate needs equally long 1-D time and value grids")
            if np.any(np.diff(t) <= 0):
                raise ValueError("sample times must be strictly increasing")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
                raise ValueError("sample grid must be finite")
        else:
            raise ValueError(f"unknown rate kind {self.kind!r}")

    @classmethod
    def constant(cls, value):
        return cls("constant", value=float(value))

    @classmethod
    def sampled(cls, times, values):
        return cls("sampled", times=tuple(map(float, times)), values=tuple(map(float, values)))

    @classmethod
    def from_function(cls, func, times):
        """Sample ``func`` on the grid ``times``."""
        times = np.asarray(times, dtype=float)
        return cls.sampled(times, [func(t) for t in times])

    @property
    def is_constant(self):
        return self.kind == "constant"

    def __call__(self, t):
        if self.kind == "constant":
            return self.value
        return float(np.interp(t, self.times, self.values))

    def is_nonnegative(self):
        if self.kind == "constant":
            return self.value >= 0
        return min(self.values) >= 0


def _as_rate(rate):
    return rate if isinstance(rate, RateProfile) else RateProfile.constant(rate)


@dataclass(frozen=True)
class LindbladGenerator:
    """``L[rho] = -i[H, rho] + sum_k eta_k(t) (A_k rho A_k^+ - {A_k^+ A_k, rho}/2)``.

    ``jumps`` is a sequence of ``(A_k, rate)`` pairs; a plain number is
    accepted as a constant rate.
    """

    hamiltonian: np.ndarray
    jumps: tuple = field(default=())

    def __post_init__(self):
        h = as_matrix(self.hamiltonian)
        if h.shape[0] != h.shape[1]:
            raise DimensionMismatchError(f"Hamiltonian must be square, got {h.shape}")
        dev = np.max(np.abs(h - dag(h)), initial=0.0)
        if dev > HERMITIAN_TOL:
            raise NotHermitianError(f"Hamiltonian deviates from Hermitian by {dev:.3g}")
        jumps = []
        for op, rate in self.jumps:
            op = as_matrix(op)
            if op.shape != h.shape:
                raise DimensionMismatchError(
                    f"jump operator shape {op.shape} does not match Hamiltonian {h.shape}"
                )
            jumps.append((op, _as_rate(rate)))
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", tuple(jumps))

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    @property
    def time_independent(self):
        return all(rate.is_constant for _, rate in self.jumps)

    def is_markovian(self):
        return all(rate.is_nonnegative() for _, rate in self.jumps)

    def rates(self, t):
        return np.array([rate(t) for _, rate in self.jumps], dtype=float)


def vectorize(rho):
    """Row-stacked, unit-norm vector of ``rho`` with its purity attached."""
    rho = as_matrix(rho)
    flat = rho.ravel()
    p = float(np.vdot(flat, flat).real)
    return VectorizedState(flat / np.sqrt(p), p)


def devectorize(v, purity_scale=None):
    """Inverse of :func:`vectorize`.

    ``v`` is a :class:`VectorizedState` or a raw vector of length ``d**2``.
    The amplitudes are multiplied by ``purity_scale`` (the Frobenius norm of
    the original operator); for a ``VectorizedState`` it defaults to
    ``sqrt(v.purity)``, for raw vectors to 1.
    """
    if isinstance(v, VectorizedState):
        amps = v.amplitudes
        scale = np.sqrt(v.purity) if purity_scale is None else purity_scale
    else:
        amps = np.asarray(v, dtype=complex).ravel()
        scale = 1.0 if purity_scale is None else purity_scale
    d = int(round(np.sqrt(amps.size)))
    if d * d != amps.size:
        raise NotSquareLengthError(f"vector length {amps.size} is not a perfect square")
    return scale * amps.reshape(d, d)


@dataclass(frozen=True)
class VectorizedState:
    """Unit vector ``|rho>> / ||rho||`` on H (x) H together with ``Tr[rho^2]``."""

    amplitudes: np.ndarray
    purity: float

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > 1e-10:
            raise ValueError(f"amplitudes must be unit norm, got norm {nrm!r}")
        if not 0.0 < self.purity <= 1.0 + PSD_TOL:
            raise ValueError(f"purity {self.purity!r} outside (0, 1]")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self):
        return self.amplitudes.size

    def density_matrix(self):
        return devectorize(self)


def apply_generator(gen, rho, tau=0.0):
    """``d rho / d tau`` under ``gen`` at time ``tau``."""
    rho = as_matrix(rho)
    if rho.shape != gen.hamiltonian.shape:
        raise DimensionMismatchError(
            f"state shape {rho.shape} does not match generator dimension {gen.dim}"
        )
    h = gen.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for (a, rate) in gen.jumps:
        eta = rate(tau)
        if eta == 0:
            continue
        ada = dag(a) @ a
        out += eta * (a @ rho @ dag(a) - 0.5 * (ada @ rho + rho @ ada))
    return out


def superoperator(gen, tau=0.0):
    """Matrix of ``gen`` acting on row-stacked vectors, at time ``tau``."""
    d = gen.dim
    eye = np.eye(d)
    h = gen.hamiltonian
    out = -1j * (kron(h, eye) - kron(eye, h.T))
    for (a, rate) in gen.jumps:
        eta = rate(tau)
        if eta == 0:
            continue
        ada = dag(a) @ a
        out += eta * (kron(a, a.conj()) - 0.5 * (kron(ada, eye) + kron(eye, ada.T)))
    return out


def _warn_if_non_markovian(gen):
    if not gen.is_markovian():
        warnings.warn(
            "rate profile takes negative values; positivity of the evolved state is not guaranteed",
            NonMarkovianWarning,
            stacklevel=3,
        )


class _Rhs:
    """Master-equation right-hand side with the jump data pre-stacked.

    The jump sum ``sum_k eta_k A_k rho A_k^+`` is done as two matmuls:
    ``rho`` times the row of all ``A_k^+``, regrouped into a column of
    blocks, then the row of all ``eta_k A_k`` times that column.
    """

    def __init__(self, gen):
        self.h = gen.hamiltonian
        self.gen = gen
        self.d = gen.dim
        self.k = len(gen.jumps)
        if gen.jumps:
            a = np.stack([op for op, _ in gen.jumps])
            self.a = a
            self.ada = np.einsum("kji,kjl->kil", a.conj(), a)
            self.a_dag_row = np.concatenate(list(dag(a)), axis=1)
        self._cached = None
        if gen.time_independent:
            self._cached = self._coefficients(0.0)

    def _coefficients(self, t):
        if not self.gen.jumps:
            return self.h, self.h, None
        eta = self.gen.rates(t)
        h_eff = self.h - 0.5j * np.einsum("k,kij->ij", eta, self.ada)
        weighted_row = np.concatenate(list(eta[:, None, None] * self.a), axis=1)
        return h_eff, dag(h_eff), weighted_row

    def __call__(self, t, rho):
        h_eff, h_eff_dag, weighted_row = (
            self._cached if self._cached is not None else self._coefficients(t)
        )
        out = -1j * (h_eff @ rho - rho @ h_eff_dag)
        if weighted_row is not None:
            d, k = self.d, self.k
            col = (rho @ self.a_dag_row).reshape(d, k, d).transpose(1, 0, 2).reshape(k * d, d)
            out += weighted_row @ col
        return out


def evolve_direct(gen, rho0, tau, steps=1000, t0=0.0):
    """Integrate the master equation with fixed-step classical RK4.

    Rates are evaluated at the RK4 stage times. The trace is never
    renormalized; if the final state is off by more than ``1e-7`` in
    Hermiticity or trace, ``ToleranceNotMetError`` is raised.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rho = as_matrix(rho0)
    if rho.shape != gen.hamiltonian.shape:
        raise DimensionMismatchError(
            f"state shape {rho.shape} does not match generator dimension {gen.dim}"
        )
    _warn_if_non_markovian(gen)
    rhs = _Rhs(gen)
    dt = tau / steps
    rho = rho.copy()
    half, sixth = 0.5 * dt, dt / 6.0
    for i in range(steps):
        t = t0 + i * dt
        k1 = rhs(t, rho)
        k2 = rhs(t + half, rho + half * k1)
        k3 = rhs(t + half, rho + half * k2)
        k4 = rhs(t + dt, rho + dt * k3)
        k2 += k3
        k2 *= 2.0
        k1 += k2
        k1 += k4
        k1 *= sixth
        rho = rho + k1
    herm_dev = np.max(np.abs(rho - dag(rho)))
    trace_dev = abs(np.trace(rho) - np.trace(rho0))
    if herm_dev > 1e-7 or trace_dev > 1e-7 or not np.all(np.isfinite(rho)):
        raise ToleranceNotMetError(
            f"integration drifted: Hermiticity {herm_dev:.3g}, trace {trace_dev:.3g}; increase steps"
        )
    return rho


def evolve_vectorized(gen, rho0, integrated):
    """``expm(X L) vec(rho0)`` normalized, for a time-independent generator shape.

    ``integrated`` is ``X``, the time integral of the scalar prefactor that
    multiplies the generator (``x * tau`` for a constant prefactor).
    """
    if not gen.time_independent:
        raise ValueError("vectorized evolution needs constant rates in the generator shape")
    _warn_if_non_markovian(gen)
    return propagate(superoperator(gen), rho0, integrated)


def propagate(lsuper, rho0, integrated=1.0, offset=None):
    """``expm(X * lsuper + offset) vec(rho0)`` as a :class:`VectorizedState`."""
    rho0 = as_matrix(rho0)
    exponent = integrated * np.asarray(lsuper)
    if offset is not None:
        exponent = exponent + offset
    w = expm(exponent) @ rho0.ravel()
    p = float(np.vdot(w, w).real)
    return VectorizedState(w / np.sqrt(p), p)
