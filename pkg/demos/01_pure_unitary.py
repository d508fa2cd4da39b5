"""Closed dynamics: the vectorized QFI is exactly twice the QFI.

For a pure probe and a unitary encoding ``exp(-i x tau H)`` the vectorized
family is again pure, and its information is ``2F``. The check below runs
over random qubit to three-qubit examples.
"""

import numpy as np

from openqfi import LindbladGenerator, ParameterizedEvolution, pure_state, superoperator
from openqfi.fisher import kappa, qcrb, qfi_closed_pure, qfi_exact, qfi_tilde_cov
from openqfi.randomness import random_hermitian, random_ket

rng = np.random.default_rng(0)

# %% A single qubit first: |+> under sigma_z, so Var(H) = 1 and F = 4 tau^2.
tau = 0.8
sz = np.diag([1.0, -1.0])
plus = np.array([1.0, 1.0]) / np.sqrt(2)
evo = ParameterizedEvolution.constant(superoperator(LindbladGenerator(sz)), 0.0, tau)
state = evo.state(pure_state(plus))
print(f"F (closed form)  = {qfi_closed_pure(plus, sz, tau):.6f}")
print(f"F~ (covariance)  = {qfi_tilde_cov(state, evo):.6f}")
print(f"kappa            = {kappa(state.density_matrix())}")

# %% The bound sqrt(kappa / F~) coincides with the Cramer-Rao bound here.
f_tilde = qfi_tilde_cov(state, evo)
print(f"sqrt(kappa/F~)   = {np.sqrt(2 / f_tilde):.6f}   1/sqrt(F) = {qcrb(4 * tau**2):.6f}")

# %% Random probes and Hamiltonians on 1-3 qubits.
worst = 0.0
for i in range(30):
    d = 2 ** (1 + i % 3)
    h = random_hermitian(d, rng)
    psi = random_ket(d, rng)
    evo = ParameterizedEvolution.constant(superoperator(LindbladGenerator(h)), 0.3, tau)
    rho0 = pure_state(psi)
    rho, drho = evo.density_and_derivative(rho0)
    f_tilde = qfi_tilde_cov(evo.state(rho0), evo)
    worst = max(worst, abs(f_tilde / (2 * qfi_exact(rho, drho)) - 1))
print(f"worst |F~/(2F) - 1| over 30 random cases: {worst:.2e}")
