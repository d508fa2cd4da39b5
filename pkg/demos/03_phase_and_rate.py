"""Independent dephasing: estimating the phase gap x1 and the rate x2.

N qubits precess with gap x1 and dephase at a time-dependent rate x2(t)
whose integral is Gamma. Product and GHZ probes are compared by the bound
``F~/kappa`` and by the exact QFI.
"""

import numpy as np

from openqfi.models import dephasing_bound_closed_forms, dephasing_exact_closed_forms, dephasing_numeric

tau, b = 1.0, 1.0

# %% The bound-to-exact ratio for x1 with product probes is 1/(1 + exp(-Gamma)).
print(" N  Gamma  ratio(num)   1/(1+e^-G)   ratio x2(num)  formula")
for n in (1, 2, 4):
    for gamma in (0.1, 0.5, 1.0, 2.0):
        r1, f1, _ = dephasing_numeric(n, gamma, tau, "product", "x1", b=b)
        r2, f2, _ = dephasing_numeric(n, gamma, tau, "product", "x2", b=b)
        x2_formula = (np.exp(2 * gamma) - np.exp(gamma)) / (np.exp(2 * gamma) + 1)
        print(f"{n:2d}  {gamma:4.1f}   {r1 / f1:.8f}   {1 / (1 + np.exp(-gamma)):.8f}"
              f"   {r2 / f2:.8f}     {x2_formula:.8f}")

# %% Without dephasing both probes sit at half the exact information.
for initial in ("product", "ghz"):
    ratio, f, _ = dephasing_numeric(3, 0.0, tau, initial, "x1")
    print(f"Gamma=0 {initial:7s}: ratio = {ratio / f:.10f}")

# %% GHZ probes approach the exact information once N*Gamma is large.
for n_gamma in (1, 5, 10, 15):
    n = 3
    ratio, f, _ = dephasing_numeric(n, n_gamma / n, tau, "ghz", "x1")
    print(f"N*Gamma={n_gamma:2d}: 1 - ratio = {1 - ratio / f:.3e}")

# %% Closed forms for reference at N = 4, Gamma = 0.5.
bound = dephasing_bound_closed_forms(4, 0.5, tau, b)
exact = dephasing_exact_closed_forms(4, 0.5, tau, b)
for key in bound:
    print(f"{key}: F~/kappa = {bound[key]:.6f}   F = {exact[key]:.6f}")
