"""Photon loss probed with a Fock state, and the precision scaling in N.

A Fock state |N> loses photons binomially. With the loss angle phi
(tan^2 phi = exp(x tau) - 1) the bound ``sqrt(kappa/F~)`` is available in
closed form; here it is checked against finite differences and fitted on a
log-log grid in N.
"""

import numpy as np

from openqfi.fisher import chain_rule
from openqfi.models import lossy_bound_closed_form, lossy_bound_numeric, phi_of_x

phis = [j * np.pi / 20 for j in range(1, 10)]

# %% Closed form against central differences of the vectorized state.
worst = max(abs(lossy_bound_numeric(n, p) / lossy_bound_closed_form(n, p) - 1)
            for n in (1, 5, 10, 20) for p in phis)
print(f"worst relative gap, closed form vs finite differences: {worst:.2e}")

# %% Log-log slope of the precision bound, N = 5..50 and at larger N.
for lo, hi in ((5, 50), (200, 2000)):
    ns = np.arange(lo, hi + 1, 1 if hi <= 50 else 50)
    slopes = []
    for p in phis:
        y = [np.sqrt(lossy_bound_closed_form(int(n), p)) for n in ns]
        slopes.append(np.polyfit(np.log(ns), np.log(y), 1)[0])
    print(f"N in [{lo}, {hi}]: slopes " + " ".join(f"{s:+.3f}" for s in slopes))

# %% Information about the loss rate x itself via the chain rule.
x, tau, n = 0.5, 1.0, 10
phi, dphidx = phi_of_x(x, tau)
f_tilde_phi = 1.0 / lossy_bound_closed_form(n, phi)  # F~/kappa in phi
print(f"phi = {phi:.4f}, F~/kappa in x = {chain_rule(f_tilde_phi, dphidx):.4f}")
