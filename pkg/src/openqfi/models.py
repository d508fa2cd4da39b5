"""Model builders and closed-form references for three open-system examples.

* k-body collective dephasing of N qubits from a common bath, probed with a
  GHZ-like state;
* independent dephasing of N qubits with a phase gap ``x1`` and a
  time-dependent dephasing rate ``x2(t)``, product versus GHZ probes;
* a lossy bosonic mode (amplitude damping) probed with a Fock state.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np
import scipy.stats

from .dynamics import LindbladGenerator, RateProfile, VectorizedState, pure_state, superoperator
from .errors import (
    DimensionLimitError,
    DomainError,
    UnsupportedOrderError,
    ZeroLogDerivativeError,
)
from .fisher import ParameterizedEvolution, kappa, qfi_exact, qfi_tilde_cov, qfi_tilde_fd
from .linalg import kron

MAX_QUBITS = 6

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


def embed(op, site, n):
    """``op`` acting on qubit ``site`` of ``n`` (qubit 0 is the leftmost factor)."""
    return kron(*[op if j == site else ID2 for j in range(n)])


def _check_qubits(n):
    if n < 1:
        raise ValueError("need at least one qubit")
    if n > MAX_QUBITS:
        raise DimensionLimitError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")


# ---------------------------------------------------------------------------
# k-body collective dephasing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KBodyModel:
    """``L[rho] = x (sum_{i1<...<ik} S rho S - C(N,k) rho)``, ``S = sz_i1 ... sz_ik``."""

    n: int
    k: int
    x: float = 1.0

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= N, got k={self.k}, N={self.n}")
        if self.k % 2 == 0:
            raise UnsupportedOrderError("only odd body orders are supported")
        _check_qubits(self.n)

    @property
    def count(self):
        return comb(self.n, self.k)


def build_kbody_generator(m):
    """Unit-strength generator: one ``sigma_z`` product per k-subset, rate 1.

    Since every product squares to the identity, the anticommutator terms
    add up to ``-C(N,k) rho``.
    """
    d = 2**m.n
    jumps = []
    for subset in combinations(range(m.n), m.k):
        op = kron(*[SIGMA_Z if j in subset else ID2 for j in range(m.n)])
        jumps.append((op, 1.0))
    return LindbladGenerator(np.zeros((d, d)), jumps)


def kbody_superoperator(m):
    return superoperator(build_kbody_generator(m))


def ghz_like_ket(n, sign=-1, observable=SIGMA_Z):
    """``(|E_max>^n + sign |E_min>^n) / sqrt(2)`` in the eigenbasis of ``observable``."""
    _, vecs = np.linalg.eigh(np.asarray(observable, dtype=complex))
    e_min, e_max = vecs[:, 0], vecs[:, -1]
    psi = kron(*[e_max[:, None]] * n).ravel() + sign * kron(*[e_min[:, None]] * n).ravel()
    return psi / np.linalg.norm(psi)


def ghz_like_state(n, sign=-1, observable=SIGMA_Z):
    """Projector onto :func:`ghz_like_ket`; ``sign=+1`` is the usual GHZ state."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return pure_state(ghz_like_ket(n, sign, observable))


def kbody_eigenrelation_check(m):
    """Residual of ``L (u - w)/sqrt 2 = -2 C(N,k) (u - w)/sqrt 2``.

    ``u = |psi>|psi*>`` for the minus-sign GHZ-like state and ``w`` the same
    for its plus-sign partner.
    """
    lsup = kbody_superoperator(m)
    psi = ghz_like_ket(m.n, -1)
    perp = ghz_like_ket(m.n, +1)
    vec = (np.kron(psi, psi.conj()) - np.kron(perp, perp.conj())) / np.sqrt(2)
    return float(np.linalg.norm(lsup @ vec + 2 * m.count * vec))


def kbody_bound_closed_form(m, tau):
    """Closed form of ``kappa / F~`` for the k-body model at time ``tau``."""
    if tau <= 0 or m.x <= 0:
        raise DomainError("need tau > 0 and x > 0")
    c = m.count
    a = 2.0 * c * tau * m.x
    # (q + 1)(q^2 + 1) / q^2 with q = exp(-a); diverges to inf for large a
    with np.errstate(over="ignore"):
        return (1.0 + np.exp(-a)) * (1.0 + np.exp(2.0 * a)) / (4.0 * tau**2 * c**2)


def kbody_evolution(m, tau):
    return ParameterizedEvolution.constant(kbody_superoperator(m), m.x, tau)


def kbody_bound_numeric(m, tau):
    """``kappa / F~`` evaluated by evolving the GHZ-like probe numerically."""
    evo = kbody_evolution(m, tau)
    state = evo.state(ghz_like_state(m.n, -1))
    return kappa(state.density_matrix()) / qfi_tilde_cov(state, evo)


# ---------------------------------------------------------------------------
# Independent dephasing with phase gap x1 and rate x2(t)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentialRate:
    """``x2(s) = a exp(b s)``; ``b`` is the (constant) log-derivative."""

    a: float
    b: float = 1.0

    def __call__(self, s):
        return self.a * np.exp(self.b * s)

    def integral(self, tau):
        if self.b == 0:
            return self.a * tau
        return self.a * np.expm1(self.b * tau) / self.b

    def log_derivative(self, tau):
        return self.b

    @classmethod
    def for_gamma(cls, gamma, tau, b=1.0):
        """Profile with growth ``b`` whose integral over ``[0, tau]`` is ``gamma``."""
        if b == 0:
            return cls(gamma / tau, 0.0)
        return cls(gamma * b / np.expm1(b * tau), b)

    def profile(self, tau, samples=4001):
        """Sampled :class:`RateProfile` on ``[0, tau]`` for direct integration."""
        return RateProfile.from_function(self, np.linspace(0.0, tau, samples))


@dataclass(frozen=True)
class DephasingModel:
    """``L[rho] = i x1 [H, rho] + (x2(t)/2)(sum_m sz_m rho sz_m - N rho)``.

    ``H = sum_m |1><1|_m``. The Hamiltonian sign follows the displayed
    generator; none of the informations depend on it.
    """

    n: int
    x1: float
    x2: ExponentialRate
    initial: str = "product"

    def __post_init__(self):
        _check_qubits(self.n)
        if self.initial not in ("product", "ghz"):
            raise ValueError("initial must be 'product' or 'ghz'")

    def gamma(self, tau):
        return float(self.x2.integral(tau))

    def initial_state(self):
        return dephasing_initial_state(self.n, self.initial)


def dephasing_initial_state(n, kind):
    if kind == "product":
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        return pure_state(kron(*[plus[:, None]] * n).ravel())
    if kind == "ghz":
        return ghz_like_state(n, +1)
    raise ValueError(f"unknown initial state {kind!r}")


def _number_operator(n):
    one = np.diag([0.0, 1.0]).astype(complex)
    return sum(embed(one, j, n) for j in range(n))


def build_dephasing_generator(m, horizon=1.0, samples=4001):
    """Full generator; ``x2`` is sampled on ``[0, horizon]`` for integration."""
    rate = m.x2.profile(horizon, samples)
    halved = RateProfile.sampled(rate.times, [0.5 * v for v in rate.values])
    jumps = [(embed(SIGMA_Z, j, m.n), halved) for j in range(m.n)]
    return LindbladGenerator(-m.x1 * _number_operator(m.n), jumps)


def dephasing_superoperators(n):
    """``(L_gap, L_rate)``: the parts multiplied by ``x1`` and by ``x2(t)``."""
    _check_qubits(n)
    d = 2**n
    l_gap = superoperator(LindbladGenerator(-_number_operator(n)))
    jumps = [(embed(SIGMA_Z, j, n), 0.5) for j in range(n)]
    l_rate = superoperator(LindbladGenerator(np.zeros((d, d)), jumps))
    return l_gap, l_rate


def dephasing_evolution(m, tau, parameter):
    """:class:`ParameterizedEvolution` for estimating ``x1`` or ``x2``."""
    l_gap, l_rate = dephasing_superoperators(m.n)
    gamma = m.gamma(tau)
    if parameter == "x1":
        return ParameterizedEvolution.constant(l_gap, m.x1, tau, offset=gamma * l_rate)
    if parameter == "x2":
        b = m.x2.log_derivative(tau)
        if b == 0:
            raise ZeroLogDerivativeError("x2 profile has vanishing log-derivative")
        return ParameterizedEvolution.profile(l_rate, gamma, b, tau, offset=m.x1 * tau * l_gap)
    raise ValueError(f"unknown parameter {parameter!r}")


def dephasing_bound_closed_forms(n, gamma, tau, log_derivative=None):
    """``F~/kappa`` for product and GHZ probes, for ``x1`` and (if given) ``x2``.

    Keys: ``"p_x1"``, ``"e_x1"``, ``"p_x2"``, ``"e_x2"``.
    """
    g = gamma
    out = {
        "p_x1": n * tau**2 * np.exp(-1.5 * g) / (2.0 * np.cosh(g / 2)),
        "e_x1": n**2 * tau**2 * np.exp(-1.5 * n * g) / (2.0 * np.cosh(n * g / 2)),
    }
    if log_derivative is not None:
        if log_derivative == 0:
            raise ZeroLogDerivativeError("x2 profile has vanishing log-derivative")
        s = log_derivative**2
        out["p_x2"] = n * np.exp(-g / 2) / (4.0 * s * np.cosh(g) * np.cosh(g / 2))
        out["e_x2"] = n**2 * np.exp(-n * g / 2) / (4.0 * s * np.cosh(n * g) * np.cosh(n * g / 2))
    return out


def dephasing_exact_closed_forms(n, gamma, tau, log_derivative=None):
    """Exact QFIs for product and GHZ probes; same keys as the bound forms.

    The ``x2`` entries diverge as ``gamma -> 0`` and are only returned for
    ``gamma > 0``.
    """
    g = gamma
    out = {
        "p_x1": n * tau**2 * np.exp(-2.0 * g),
        "e_x1": n**2 * tau**2 * np.exp(-2.0 * n * g),
    }
    if log_derivative is not None:
        if log_derivative == 0:
            raise ZeroLogDerivativeError("x2 profile has vanishing log-derivative")
        if g <= 0:
            raise DomainError("the x2 informations diverge at gamma = 0")
        s = log_derivative**2
        out["p_x2"] = n * np.exp(-g) / (2.0 * s * np.sinh(g))
        out["e_x2"] = n**2 * np.exp(-n * g) / (2.0 * s * np.sinh(n * g))
    return out


def dephasing_numeric(n, gamma, tau, initial, parameter, b=1.0, x1=1.0):
    """Numeric ``(F~/kappa, F, F~)`` for the dephasing example.

    For product probes ``kappa`` is taken from the single-probe state, as the
    information of a product probe is additive. ``kappa`` always uses the
    mixed-state expression, which is continuous as ``gamma -> 0``.
    """
    x2 = ExponentialRate.for_gamma(gamma, tau, b)
    m = DephasingModel(n, x1, x2, initial)
    rho0 = m.initial_state()
    evo = dephasing_evolution(m, tau, parameter)
    state = evo.state(rho0)
    f_tilde = qfi_tilde_cov(state, evo)
    if initial == "product":
        m1 = DephasingModel(1, x1, x2, initial)
        rho1 = dephasing_evolution(m1, tau, parameter).state(m1.initial_state())
        k = kappa(rho1.density_matrix(), branch="mixed")
    else:
        k = kappa(state.density_matrix(), branch="mixed")
    rho, drho = evo.density_and_derivative(rho0)
    return f_tilde / k, qfi_exact(rho, drho), f_tilde



# ---------------------------------------------------------------------------
# Lossy bosonic mode
# ---------------------------------------------------------------------------


def phi_of_x(x, tau):
    """Angle with ``tan(phi)^2 = exp(x tau) - 1`` and its derivative in ``x``."""
    xt = x * tau
    if not xt > 0:
        raise DomainError(f"need x * tau > 0, got {xt!r}")
    t = np.sqrt(np.expm1(xt))
    return float(np.arctan(t)), float(tau / (2.0 * t))


@dataclass(frozen=True)
class LossyBosonModel:
    """``L[rho] = x (a rho a^+ - (n rho + rho n)/2)`` on Fock levels ``0..N``."""

    n: int
    x: float
    tau: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("Fock number must be >= 0")

    @property
    def cutoff(self):
        return self.n + 1

    @property
    def phi(self):
        return phi_of_x(self.x, self.tau)[0]


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)


def fock_state(n, dim):
    rho = np.zeros((dim, dim), dtype=complex)
    rho[n, n] = 1.0
    return rho


def build_lossy_generator(m):
    d = m.cutoff
    return LindbladGenerator(np.zeros((d, d)), [(annihilation(d), m.x)])


def _loss_weights(n, phi):
    # C(n,m) s^2m c^2(n-m) is the binomial pmf with success probability s^2
    m = np.arange(n + 1)
    return m, scipy.stats.binom.pmf(m, n, np.sin(phi) ** 2)


def lossy_vectorized_state(n, phi):
    """Vectorized state after loss angle ``phi`` from the Fock state ``|n>``.

    ``m`` photons are lost with probability ``C(n,m) s^2m c^2(n-m)``.
    """
    if not 0 < phi < np.pi / 2:
        raise DomainError("phi must lie in (0, pi/2)")
    d = n + 1
    m, p = _loss_weights(n, phi)
    vec = np.zeros(d * d, dtype=complex)
    vec[(n - m) * d + (n - m)] = p
    nrm2 = float(np.sum(p**2))
    return VectorizedState(vec / np.sqrt(nrm2), nrm2)


def lossy_bound_closed_form(n, phi):
    """Closed form of ``kappa / F~`` (information about ``phi``) for Fock input ``|n>``."""
    if not 0 < phi < np.pi / 2:
        raise DomainError("phi must lie in (0, pi/2)")
    m, p = _loss_weights(n, phi)
    cot2 = 1.0 / np.tan(phi) ** 2
    a = m * (1.0 + cot2) - n
    w = p**2
    spread = np.sum(w * a**2) - np.sum(w * a) ** 2 / np.sum(w)
    return 0.25 * cot2 * np.max(p) / spread


def lossy_bound_numeric(n, phi, h=None):
    """``kappa / F~`` with ``F~`` by central differences in ``phi``."""
    f_tilde = qfi_tilde_fd(lambda ph: lossy_vectorized_state(n, ph), phi, h)
    rho = lossy_vectorized_state(n, phi).density_matrix()
    return kappa(rho) / f_tilde


def lossy_density_and_derivative(n, phi):
    """Evolved Fock-input state and its exact derivative with respect to ``phi``."""
    if not 0 < phi < np.pi / 2:
        raise DomainError("phi must lie in (0, pi/2)")
    d = n + 1
    m, p = _loss_weights(n, phi)
    a = m * (1.0 + 1.0 / np.tan(phi) ** 2) - n
    rho = np.zeros((d, d), dtype=complex)
    drho = np.zeros((d, d), dtype=complex)
    rho[n - m, n - m] = p
    drho[n - m, n - m] = 2.0 * np.tan(phi) * p * a
    return rho, drho
