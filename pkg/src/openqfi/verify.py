"""Self-verification suites run by ``openqfi verify``.

Each check evaluates one property over a batch of models, records the worst
margin it saw and whether that margin is within tolerance. Results are plain
dictionaries so that the CLI can serialize them without further work.
"""

from dataclasses import dataclass
import warnings

import numpy as np

from . import dynamics, fisher, linalg, models
from .randomness import random_density_matrix, random_generator, random_hermitian, random_ket
from .randomness import random_superoperator

SUITES = ("bounds", "examples", "dynamics")

# Every public operation of the numerical modules; ``verify all`` must touch each one.
OPERATIONS = (
    "kron", "eigh", "expm", "expm_frechet",
    "vectorize", "devectorize", "apply_generator", "superoperator",
    "evolve_direct", "evolve_vectorized",
    "sld", "qfi_exact", "qfi_closed_pure", "qfi_tilde_cov", "qfi_tilde_fd",
    "qfi_tilde_from_sld", "kappa", "sandwich_bounds", "qcrb", "chain_rule",
    "build_kbody_generator", "ghz_like_state", "kbody_eigenrelation_check",
    "kbody_bound_closed_form", "build_dephasing_generator",
    "dephasing_bound_closed_forms", "dephasing_exact_closed_forms",
    "build_lossy_generator", "lossy_vectorized_state", "lossy_bound_closed_form",
    "phi_of_x",
)

REFERENCE_PHIS = tuple(j * np.pi / 20 for j in range(1, 10))


@dataclass
class Check:
    name: str
    suite: str
    ops: tuple
    func: object


_REGISTRY = []


def check(suite, *ops):
    def wrap(func):
        _REGISTRY.append(Check(func.__name__, suite, ops, func))
        return func
    return wrap


def _result(name, worst, tol, count, detail=""):
    return {
        "name": name,
        "passed": bool(worst <= tol),
        "worst": float(worst),
        "tolerance": float(tol),
        "cases": int(count),
        "detail": detail,
    }


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def random_family(rng, d):
    """Random full-rank semigroup family ``(evo, rho0)`` on dimension ``d``."""
    lsup = random_superoperator(d, rng)
    rho0 = random_density_matrix(d, rng, floor=0.3)
    x0 = float(rng.uniform(0.2, 1.0))
    tau = float(rng.uniform(0.3, 1.5))
    return fisher.ParameterizedEvolution.constant(lsup, x0, tau), rho0


def fd_density_derivative(evo, rho0, h=1e-5):
    """Central difference of the evolved density matrix in the estimated parameter."""
    x0 = evo.integrated / evo.tau

    def rho_at(x):
        return evo.state(rho0, x * evo.tau).density_matrix()

    drho = (rho_at(x0 + h) - rho_at(x0 - h)) / (2 * h)
    return 0.5 * (drho + linalg.dag(drho))


# --------------------------------------------------------------------- bounds


@check("bounds", "qfi_closed_pure", "qfi_exact", "qfi_tilde_cov", "expm", "expm_frechet", "sld")
def pure_unitary_equality(rng, cfg):
    worst, count = 0.0, 0
    for i in range(cfg.get("pure_cases", 200)):
        n = 1 + i % 3
        d = 2**n
        h = random_hermitian(d, rng)
        psi = random_ket(d, rng)
        tau = float(rng.uniform(0.2, 2.0))
        x0 = float(rng.uniform(-1.0, 1.0))
        lsup = dynamics.superoperator(dynamics.LindbladGenerator(h))
        evo = fisher.ParameterizedEvolution.constant(lsup, x0, tau)
        rho0 = dynamics.pure_state(psi)
        state = evo.state(rho0)
        f_tilde = fisher.qfi_tilde_cov(state, evo)
        rho, drho = evo.density_and_derivative(rho0)
        f = fisher.qfi_exact(rho, drho)
        f_closed = fisher.qfi_closed_pure(psi, h, tau)
        worst = max(worst, _rel(f_tilde, 2 * f), _rel(f, f_closed))
        count += 1
    return _result("pure_unitary_equality", worst, 1e-8, count, "F~ = 2F and F = 4 tau^2 Var H")


@check("bounds", "kappa", "qfi_tilde_cov", "qfi_exact", "sandwich_bounds", "qfi_tilde_from_sld",
       "qfi_tilde_fd")
def random_family_bounds(rng, cfg):
    """Ordering ``1/F <= kappa/F~`` and ``lower <= F <= upper`` on random families."""
    order_worst = sand_worst = ident_worst = 0.0
    count = 0
    for i in range(cfg.get("bound_cases", 1000)):
        d = 2 + i % 2
        evo, rho0 = random_family(rng, d)
        state = evo.state(rho0)
        rho = state.density_matrix()
        drho = fd_density_derivative(evo, rho0)
        ell = fisher.sld(rho, drho)
        f = float(np.trace(rho @ ell @ ell).real)
        f_tilde = fisher.qfi_tilde_cov(state, evo)
        k = fisher.kappa(rho)
        # relative violation of 1/F <= kappa/F~
        order_worst = max(order_worst, (1.0 / f - k / f_tilde) * f)
        lower, upper, _ = fisher.sandwich_bounds(rho, ell, f_tilde)
        sand_worst = max(sand_worst, (lower - f) / f, (f - upper) / f)
        if i % 50 == 0:
            x0 = evo.integrated / evo.tau
            f_fd = fisher.qfi_tilde_fd(lambda x: evo.state(rho0, x * evo.tau), x0)
            f_sld = fisher.qfi_tilde_from_sld(rho, ell)
            ident_worst = max(ident_worst, _rel(f_fd, f_tilde), _rel(f_sld, f_tilde))
        count += 1
    return [
        _result("dissipative_bound_ordering", order_worst, 1e-8, count, "1/F <= kappa/F~"),
        _result("sandwich_bounds", sand_worst, 1e-8, count, "lower <= F <= upper"),
        _result("vectorized_qfi_identities", ident_worst, 1e-5, (count + 49) // 50,
                "covariance = finite difference = SLD expression"),
    ]


@check("bounds", "qcrb", "chain_rule", "phi_of_x")
def precision_and_reparametrization(rng, cfg):
    worst = 0.0
    count = 0
    for _ in range(20):
        f = float(rng.uniform(0.1, 10))
        m = int(rng.integers(1, 100))
        worst = max(worst, _rel(fisher.qcrb(f, m) ** -2, m * f))
        x = float(rng.uniform(0.1, 2.0))
        tau = float(rng.uniform(0.2, 2.0))
        phi, dphi = models.phi_of_x(x, tau)
        h = 1e-6
        dfd = (models.phi_of_x(x + h, tau)[0] - models.phi_of_x(x - h, tau)[0]) / (2 * h)
        worst = max(worst, abs(dphi - dfd))
        f_phi = float(rng.uniform(0.1, 10))
        worst = max(worst, _rel(fisher.chain_rule(f_phi, dphi), dphi**2 * f_phi))
        count += 1
    return _result("qcrb_and_chain_rule", worst, 1e-8, count)


# ------------------------------------------------------------------- examples


@check("examples", "build_kbody_generator", "ghz_like_state", "kbody_eigenrelation_check",
       "kbody_bound_closed_form", "vectorize", "kron")
def kbody_example(rng, cfg):
    resid = closed = 0.0
    count = 0
    for n in range(1, 6):
        for k in range(1, n + 1, 2):
            m = models.KBodyModel(n, k, 1.0)
            resid = max(resid, models.kbody_eigenrelation_check(m))
            psi = models.ghz_like_ket(n, -1)
            v = dynamics.vectorize(models.ghz_like_state(n, -1)).amplitudes
            resid = max(resid, np.max(np.abs(v - linalg.kron(psi, psi.conj()))))
            for xt in (0.01, 0.1, 0.5):
                mx = models.KBodyModel(n, k, xt)
                closed = max(closed, _rel(models.kbody_bound_numeric(mx, 1.0),
                                          models.kbody_bound_closed_form(mx, 1.0)))
            count += 1
    return [
        _result("kbody_eigenrelation", resid, 1e-10, count),
        _result("kbody_closed_form", closed, 1e-8, 3 * count),
    ]


@check("examples", "dephasing_bound_closed_forms", "dephasing_exact_closed_forms",
       "build_dephasing_generator", "evolve_direct")
def dephasing_example(rng, cfg):
    tau = 1.0
    worst_closed = worst_ratio = 0.0
    count = 0
    for n in range(1, 5):
        for gamma in (0.1, 0.5, 1.0, 2.0):
            bounds = models.dephasing_bound_closed_forms(n, gamma, tau, 1.0)
            exact = models.dephasing_exact_closed_forms(n, gamma, tau, 1.0)
            for initial, tag in (("product", "p"), ("ghz", "e")):
                for par in ("x1", "x2"):
                    key = f"{tag}_{par}"
                    bound, f, _ = models.dephasing_numeric(n, gamma, tau, initial, par)
                    worst_closed = max(worst_closed, _rel(bound, bounds[key]), _rel(f, exact[key]))
                    count += 1
            r1 = models.dephasing_numeric(n, gamma, tau, "product", "x1")
            r2 = models.dephasing_numeric(n, gamma, tau, "product", "x2")
            worst_ratio = max(
                worst_ratio,
                abs(r1[0] / r1[1] - 1.0 / (1.0 + np.exp(-gamma))),
                abs(r2[0] / r2[1] - (np.exp(2 * gamma) - np.exp(gamma)) / (np.exp(2 * gamma) + 1)),
            )
    half = 0.0
    for n in range(1, 5):
        for initial in ("product", "ghz"):
            bound, f, _ = models.dephasing_numeric(n, 0.0, tau, initial, "x1")
            half = max(half, abs(bound / f - 0.5))
    n, gamma = 3, 5.0
    bound, f, _ = models.dephasing_numeric(n, gamma, tau, "ghz", "x1")
    ghz_limit = abs(bound / f - 1.0)
    # time-dependent rate integrated directly reproduces the Gamma-based state
    m = models.DephasingModel(2, 1.0, models.ExponentialRate.for_gamma(0.5, tau), "ghz")
    gen = models.build_dephasing_generator(m, horizon=tau)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        direct = dynamics.evolve_direct(gen, m.initial_state(), tau, steps=cfg.get("steps", 10000) // 10)
    ref = models.dephasing_evolution(m, tau, "x1").state(m.initial_state()).density_matrix()
    return [
        _result("dephasing_closed_forms", worst_closed, 1e-5, count),
        _result("dephasing_ratio_identities", worst_ratio, 1e-6, 16),
        _result("dephasing_unitary_limit_half", half, 1e-8, 8),
        _result("dephasing_ghz_ratio_limit", ghz_limit, 5e-7, 1, "N*Gamma = 15"),
        _result("dephasing_time_dependent_rate", dynamics.trace_distance(direct, ref), 1e-6, 1),
    ]


@check("examples", "dephasing_bound_closed_forms", "qfi_tilde_cov")
def product_additivity(rng, cfg):
    worst = 0.0
    for gamma in (0.1, 0.5, 1.0):
        _, _, f1 = models.dephasing_numeric(1, gamma, 1.0, "product", "x1")
        for n in range(2, 5):
            _, _, fn = models.dephasing_numeric(n, gamma, 1.0, "product", "x1")
            worst = max(worst, _rel(fn, n * f1))
    return _result("product_additivity", worst, 1e-8, 9)


@check("examples", "lossy_vectorized_state", "lossy_bound_closed_form", "build_lossy_generator",
       "devectorize", "qfi_tilde_fd")
def lossy_example(rng, cfg):
    worst = 0.0
    count = 0
    for n in (1, 5, 10, 20):
        for phi in REFERENCE_PHIS:
            worst = max(worst, _rel(models.lossy_bound_numeric(n, phi),
                                    models.lossy_bound_closed_form(n, phi)))
            count += 1
    # closed-form state against integrating the loss master equation
    state_err = 0.0
    for n in (1, 3):
        m = models.LossyBosonModel(n, 0.7, 1.0)
        gen = models.build_lossy_generator(m)
        rho = dynamics.evolve_direct(gen, models.fock_state(n, m.cutoff), m.tau, steps=2000)
        ref = models.lossy_vectorized_state(n, m.phi).density_matrix()
        state_err = max(state_err, dynamics.trace_distance(rho, ref))
    results = [
        _result("lossy_closed_form", worst, 1e-6, count),
        _result("lossy_state_vs_integration", state_err, 1e-8, 2),
    ]
    for phi, slope in figure2_slopes(range(5, 51), REFERENCE_PHIS).items():
        results.append(_result(f"figure2_slope_phi={phi:.17g}", abs(slope + 0.5), 0.03, 46,
                               f"slope {slope:.17g}"))
    return results


def figure2_slopes(ns, phis):
    ns = np.asarray(list(ns), dtype=float)
    out = {}
    for phi in phis:
        y = [np.sqrt(models.lossy_bound_closed_form(int(n), phi)) for n in ns]
        out[phi] = float(np.polyfit(np.log(ns), np.log(y), 1)[0])
    return out


# ------------------------------------------------------------------- dynamics


@check("dynamics", "evolve_direct", "evolve_vectorized", "superoperator", "apply_generator",
       "devectorize", "vectorize", "eigh")
def dynamics_consistency(rng, cfg):
    steps = cfg.get("steps", 10000)
    dist = drift = herm = 0.0
    neg = 0.0
    consist = 0.0
    cases = cfg.get("dynamics_cases", 20)
    for i in range(cases):
        d = 2 if i % 2 == 0 else 4
        gen = random_generator(d, rng)
        lsup = dynamics.superoperator(gen)
        tau = float(rng.uniform(0.5, 5.0)) / np.linalg.norm(lsup, 2)
        rho0 = random_density_matrix(d, rng, rank=1 + i % d)
        direct = dynamics.evolve_direct(gen, rho0, tau, steps)
        vec = dynamics.evolve_vectorized(gen, rho0, tau).density_matrix()
        dist = max(dist, dynamics.trace_distance(direct, vec))
        drift = max(drift, abs(np.trace(direct).real - 1.0))
        herm = max(herm, np.max(np.abs(direct - linalg.dag(direct))))
        neg = max(neg, -linalg.eigh(0.5 * (direct + linalg.dag(direct)))[0][0])
        back = dynamics.devectorize(lsup @ rho0.ravel())
        consist = max(consist, np.max(np.abs(back - dynamics.apply_generator(gen, rho0))))
    return [
        _result("direct_vs_vectorized", dist, 1e-8, cases),
        _result("trace_drift", drift, 1e-9, cases),
        _result("hermiticity", herm, 1e-9, cases),
        _result("positivity", neg, 1e-7, cases),
        _result("superoperator_consistency", consist, 1e-12, cases),
    ]


@check("dynamics", "expm", "expm_frechet")
def semigroup_and_frechet(rng, cfg):
    semi = fd = 0.0
    for _ in range(20):
        lsup = random_superoperator(2, rng, target_norm=1.0)
        x1, x2 = rng.uniform(0.1, 1.0, size=2)
        rho0 = random_density_matrix(2, rng)
        a = dynamics.propagate(lsup, rho0, x1 + x2).density_matrix()
        mid = dynamics.propagate(lsup, rho0, x1).density_matrix()
        b = dynamics.propagate(lsup, mid, x2).density_matrix()
        semi = max(semi, np.max(np.abs(a - b)))
        m = random_hermitian(3, rng) + 1j * random_hermitian(3, rng)
        m /= np.linalg.norm(m, 2)
        e = random_hermitian(3, rng)
        h = 1e-5
        approx = (linalg.expm(m + h * e) - linalg.expm(m - h * e)) / (2 * h)
        fd = max(fd, np.max(np.abs(linalg.expm_frechet(m, e) - approx)))
    return [
        _result("semigroup_composition", semi, 1e-10, 20),
        _result("frechet_vs_finite_difference", fd, 1e-6, 20),
    ]


def run(suite="all", seed=1, steps=10000):
    """Run one suite (or ``"all"``) and return the machine-readable report."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES + ('all',)}")
    rng = np.random.default_rng(seed)
    cfg = {"steps": steps}
    results = []
    touched = set()
    for chk in _REGISTRY:
        if suite != "all" and chk.suite != suite:
            continue
        out = chk.func(rng, cfg)
        for res in out if isinstance(out, list) else [out]:
            res["suite"] = chk.suite
            results.append(res)
        touched.update(chk.ops)
    report = {"suite": suite, "seed": seed, "steps": steps, "checks": results}
    if suite == "all":
        missing = sorted(set(OPERATIONS) - touched)
        report["coverage"] = {"operations": len(OPERATIONS), "missing": missing}
        results.append(_result("operation_coverage", len(missing), 0, len(OPERATIONS)))
        results[-1]["suite"] = "all"
    report["passed"] = all(r["passed"] for r in results)
    return report
