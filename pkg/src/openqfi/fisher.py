"""Quantum Fisher information and the dissipative Cramer-Rao bound.

Two informations appear side by side here:

* the ordinary QFI ``F = Tr[rho L^2]`` of a family of density matrices,
  with ``L`` the symmetric logarithmic derivative (SLD);
* the QFI ``F~`` of the *vectorized* family ``x -> |rho(x)>> / ||rho(x)||``,
  a pure-state family on H (x) H. For semigroup dynamics
  ``exp(X Lshape)`` it reduces to a covariance of the generator shape.

The two are related by ``1/F <= kappa / F~`` with ``kappa = 4 lambda_max /
Tr[rho^2]`` (mixed) or ``2`` (pure, where equality holds).
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import VectorizedState, propagate, purity
from .errors import (
    NonpositiveInformationError,
    NotHermitianError,
    NotTracelessError,
    SingularStateError,
    ZeroLogDerivativeError,
)
from .linalg import as_matrix, dag, eigh, expm, expm_frechet

SUPPORT_TOL = 1e-12
PURE_TOL = 1e-9
SINGULAR_TOL = 1e-9
COMMUTE_TOL = 1e-13


def default_step(x0):
    return 1e-5 * max(1.0, abs(x0))


def sld(rho, drho, tol=1e-9):
    """Symmetric logarithmic derivative of ``rho`` along ``drho``.

    Solves ``drho = (L rho + rho L) / 2`` in the eigenbasis of ``rho``.
    Matrix elements between eigenvectors with ``r_i + r_j < 1e-12`` are set
    to zero, so ``L`` lives on the support of ``rho``.
    """
    rho = as_matrix(rho)
    drho = as_matrix(drho)
    dev = np.max(np.abs(drho - dag(drho)), initial=0.0)
    if dev > tol:
        raise NotHermitianError(f"drho deviates from Hermitian by {dev:.3g}")
    tr = abs(np.trace(drho))
    if tr > tol:
        raise NotTracelessError(f"drho has trace {tr:.3g}")
    r, v = eigh(rho, tol=max(tol, 1e-10))
    d_eig = dag(v) @ drho @ v
    denom = r[:, None] + r[None, :]
    keep = denom >= SUPPORT_TOL
    l_eig = np.zeros_like(d_eig)
    l_eig[keep] = 2.0 * d_eig[keep] / denom[keep]
    out = v @ l_eig @ dag(v)
    return 0.5 * (out + dag(out))


def qfi_exact(rho, drho):
    """``Tr[rho L^2]`` for the SLD ``L`` of ``(rho, drho)``."""
    rho = as_matrix(rho)
    ell = sld(rho, drho)
    return float(np.trace(rho @ ell @ ell).real)


def qfi_closed_pure(psi, hgen, tau):
    """``4 tau^2 Var_psi(H)`` for the unitary family ``exp(-i x tau H) |psi>``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    h = as_matrix(hgen)
    hpsi = h @ psi
    mean = np.vdot(psi, hpsi).real
    second = np.vdot(hpsi, hpsi).real
    return 4.0 * tau**2 * (second - mean**2)


def pure_family_qfi(v, dv):
    """QFI ``4(<dv|dv>/n - |<v|dv>|^2/n^2)`` of a (possibly unnormalized) ket family."""
    n = np.vdot(v, v).real
    return 4.0 * (np.vdot(dv, dv).real / n - abs(np.vdot(v, dv)) ** 2 / n**2)


@dataclass(frozen=True)
class ParameterizedEvolution:
    """Semigroup family ``vec rho = expm(X * shape + offset) vec rho0``.

    ``shape`` is the superoperator that the estimated parameter multiplies
    and ``integrated`` is ``X``, the time integral of that parameter.
    ``offset`` holds any already-integrated, parameter-free part of the
    exponent (it must commute with ``shape`` for the covariance formula).

    For a constant parameter ``X = x tau`` and the information is converted
    with ``(dX/dx)^2 = tau^2``. For a profile ``x(s)`` the estimated quantity
    is taken to be the one whose conversion factor is
    ``1 / (d ln x / d tau)^2``.
    """

    shape: np.ndarray
    integrated: float
    tau: float
    log_derivative: float | None = None
    offset: np.ndarray | None = None

    @classmethod
    def constant(cls, shape, x, tau, offset=None):
        return cls(np.asarray(shape, dtype=complex), x * tau, tau, None, offset)

    @classmethod
    def profile(cls, shape, integrated, log_derivative, tau, offset=None):
        if not np.isfinite(log_derivative) or log_derivative == 0:
            raise ZeroLogDerivativeError("log-derivative of the profile must be finite and nonzero")
        return cls(np.asarray(shape, dtype=complex), integrated, tau, log_derivative, offset)

    @property
    def kind(self):
        return "constant" if self.log_derivative is None else "profile"

    def prefactor(self):
        """``(dX / d estimated quantity)^2``."""
        if self.log_derivative is None:
            return self.tau**2
        if self.log_derivative == 0:
            raise ZeroLogDerivativeError("log-derivative of the profile vanishes")
        return 1.0 / self.log_derivative**2

    def exponent(self, integrated=None):
        x = self.integrated if integrated is None else integrated
        out = x * self.shape
        if self.offset is not None:
            out = out + self.offset
        return out

    def state(self, rho0, integrated=None):
        x = self.integrated if integrated is None else integrated
        return propagate(self.shape, rho0, x, self.offset)

    def commutes(self):
        """Whether ``shape`` commutes with ``offset`` (relative to their norms)."""
        if self.offset is None:
            return True
        comm = self.shape @ self.offset - self.offset @ self.shape
        scale = np.linalg.norm(self.shape) * np.linalg.norm(self.offset)
        return bool(np.linalg.norm(comm) <= COMMUTE_TOL * max(scale, 1.0))

    def propagate_with_derivative(self, v0):
        """``(w, dw/dX)`` for ``w = expm(X * shape + offset) v0``.

        Commuting exponents give ``dw/dX = shape w``; otherwise the Frechet
        derivative of ``expm`` is used, which costs a ``2d^2``-sized exponential.
        """
        gen = self.exponent()
        w = expm(gen) @ v0
        if self.commutes():
            return w, self.shape @ w
        return w, expm_frechet(gen, self.shape) @ v0

    def density_and_derivative(self, rho0):
        """Evolved ``rho`` and exact ``d rho / d(estimated quantity)``.

        ``shape`` and ``offset`` need not commute; see
        :meth:`propagate_with_derivative`.
        """
        rho0 = as_matrix(rho0)
        d = rho0.shape[0]
        u, du = self.propagate_with_derivative(rho0.ravel())
        scale = np.sqrt(self.prefactor())
        rho = u.reshape(d, d)
        drho = scale * du.reshape(d, d)
        return 0.5 * (rho + dag(rho)), 0.5 * (drho + dag(drho))


def qfi_tilde_cov(state, evo):
    """Vectorized QFI from the generator covariance in ``state``.

    ``prefactor * 4 (<L^+ L> - |<L>|^2)`` with ``L = evo.shape`` and the
    prefactor ``tau^2`` (constant parameter) or ``1/(d ln x/d tau)^2``.
    """
    amps = state.amplitudes if isinstance(state, VectorizedState) else np.asarray(state)
    lv = evo.shape @ amps
    mean = np.vdot(amps, lv)
    cov = np.vdot(lv, lv).real - abs(mean) ** 2
    return evo.prefactor() * 4.0 * max(cov, 0.0)


def qfi_tilde_exact(evo, rho0):
    """Vectorized QFI from the exact derivative of the propagator.

    Unlike :func:`qfi_tilde_cov` this stays exact when ``evo.offset`` does
    not commute with ``evo.shape``.
    """
    rho0 = as_matrix(rho0)
    w, dw = evo.propagate_with_derivative(rho0.ravel())
    return evo.prefactor() * max(pure_family_qfi(w, dw), 0.0)


def qfi_tilde_fd(family, x0, h=None):
    """Vectorized QFI by central differences of ``family(x)``.

    ``family`` maps a parameter value to a :class:`VectorizedState` (or a
    unit vector). The result does not depend on x-dependent global phases.
    """
    h = default_step(x0) if h is None else h
    if h <= 0:
        raise ValueError("step must be positive")

    def amps(x):
        s = family(x)
        return s.amplitudes if isinstance(s, VectorizedState) else np.asarray(s, dtype=complex)

    v0 = amps(x0)
    vp, vm = amps(x0 + h), amps(x0 - h)
    dv = (vp - vm) / (2.0 * h)
    return max(pure_family_qfi(v0, dv), 0.0)


def qfi_tilde_from_sld(rho, ell):
    """Vectorized QFI written through the SLD of ``rho``:

    ``(2/P)(Tr[rho L rho L] + Tr[rho^2 L^2] - 2 Tr[rho^2 L]^2 / P)``, ``P = Tr[rho^2]``.
    """
    rho = as_matrix(rho)
    ell = as_matrix(ell)
    p = purity(rho)
    rl = rho @ ell
    rho2 = rho @ rho
    t1 = np.trace(rl @ rl).real
    t2 = np.trace(rho2 @ ell @ ell).real
    t3 = np.trace(rho2 @ ell).real
    return 2.0 / p * (t1 + t2 - 2.0 * t3**2 / p)


def kappa(rho, purity_tol=PURE_TOL, branch="auto"):
    """Conversion factor between ``F~`` and ``F``.

    ``branch="auto"`` returns 2 for states with ``Tr[rho^2] > 1 - purity_tol``
    and ``4 lambda_max / Tr[rho^2]`` otherwise. ``branch="mixed"`` always
    uses the second expression (its continuous extension to pure states is 4).
    """
    rho = as_matrix(rho)
    p = purity(rho)
    if branch == "auto" and p > 1.0 - purity_tol:
        return 2.0
    if branch not in ("auto", "mixed"):
        raise ValueError(f"unknown kappa branch {branch!r}")
    lam_max = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))[-1]
    return 4.0 * lam_max / p


def sandwich_bounds(rho, ell, f_tilde):
    """Lower and upper bounds on ``F`` from ``F~``, plus the correction term.

    Returns ``(lower, upper, correction)`` with

    * ``lower = P / (4 lambda_max) * F~``
    * ``correction = Tr[rho^2 L]^2 / (lambda_min P)``
    * ``upper = P / (4 lambda_min) * F~ + correction``

    Raises ``SingularStateError`` (carrying the lower bound in
    ``.lower``) when ``lambda_min <= 1e-9``.
    """
    rho = as_matrix(rho)
    ell = as_matrix(ell)
    p = purity(rho)
    lam = np.linalg.eigvalsh(0.5 * (rho + dag(rho)))
    lower = p / (4.0 * lam[-1]) * f_tilde
    if lam[0] <= SINGULAR_TOL:
        err = SingularStateError(
            f"lambda_min = {lam[0]:.3g}; the upper bound is not defined for singular states"
        )
        err.lower = lower
        raise err
    t = np.trace(rho @ rho @ ell).real
    correction = t**2 / (lam[0] * p)
    upper = p / (4.0 * lam[0]) * f_tilde + correction
    return lower, upper, correction


def qcrb(f, repetitions=1):
    """Smallest standard deviation ``1/sqrt(M F)`` allowed by information ``f``."""
    if not f > 0:
        raise NonpositiveInformationError(f"Fisher information must be positive, got {f!r}")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    return 1.0 / np.sqrt(repetitions * f)


def chain_rule(f_wrt_a, dadb):
    """Information about ``b`` given information about ``a`` and ``da/db``."""
    return dadb**2 * f_wrt_a


@dataclass(frozen=True)
class QfiReport:
    """Informations and bounds for one model and parameter point.

    Fields that cannot be computed (exact QFI unknown, singular state) are
    ``None``; a short reason is kept in ``note``.
    """

    qfi_exact: float | None
    qfi_tilde: float
    kappa: float
    bound_lower: float | None
    bound_upper: float | None
    correction: float | None
    precision_bound: float | None
    repetitions: int = 1
    note: str = ""

    def as_dict(self):
        return {
            "F_exact": self.qfi_exact,
            "F_tilde": self.qfi_tilde,
            "kappa": self.kappa,
            "bound_lower": self.bound_lower,
            "bound_upper": self.bound_upper,
            "correction": self.correction,
            "delta_x_min": self.precision_bound,
            "M": self.repetitions,
            "note": self.note,
        }


def qfi_report(rho, drho, f_tilde, repetitions=1, kappa_value=None):
    """Bundle ``F``, ``F~``, ``kappa``, the sandwich bounds and ``sqrt(kappa/(M F~))``."""
    rho = as_matrix(rho)
    notes = []
    k = kappa(rho) if kappa_value is None else kappa_value
    f_exact = lower = upper = correction = None
    if drho is not None:
        ell = sld(rho, drho)
        f_exact = float(np.trace(rho @ ell @ ell).real)
        try:
            lower, upper, correction = sandwich_bounds(rho, ell, f_tilde)
        except SingularStateError as err:
            lower = err.lower
            notes.append("singular_state")
    else:
        notes.append("exact_unavailable")
    if f_tilde > 0:
        precision = float(np.sqrt(k / (repetitions * f_tilde)))
    else:
        precision = None
        notes.append("zero_information")
    return QfiReport(
        f_exact, float(f_tilde), float(k), lower, upper, correction, precision,
        repetitions, ";".join(notes),
    )
