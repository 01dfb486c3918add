# exponential_envelope.py
#
# Verify the exponential-stability claim for the concurrent-learning law as
# a numerical envelope: after the finite-excitation latch at t_f, the
# combined error y = (e, theta_tilde) must stay below
# mu0 ||y(t_f)|| exp(-mu1 (t - t_f)) with mu1 computed from the measured
# excitation level sigma1.

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from eqadapt import load_scenario, lyapunov_series, run

outdir = os.path.join(os.path.dirname(__file__), "figures")
os.makedirs(outdir, exist_ok=True)

scenario = load_scenario("paper_sim2")
log = run(scenario)
report = lyapunov_series(log, scenario.gamma)

idx = log.fe_latch_index
t_f = log.fe_latch_time
y_norm = np.sqrt(np.sum(log.e**2, axis=1) + np.sum(log.theta_tilde**2, axis=1))
bound = report.mu0 * y_norm[idx] * np.exp(-report.mu1 * (log.t[idx:] - t_f))

print(f"sigma1 = {log.sigma1:.2f}  mu0 = {report.mu0:.3f}  mu1 = {report.mu1:.4f}")
print(f"envelope holds pointwise: {bool(np.all(y_norm[idx:] <= bound * (1 + 1e-6)))}")
print(f"V non-increasing and envelope satisfied: {report.envelope_ok}")

fig, ax = plt.subplots(figsize=(9, 5))
ax.semilogy(log.t, y_norm, label=r"$\|y(t)\| = \|(e,\tilde\theta)\|$")
ax.semilogy(log.t[idx:], bound, "r--",
            label=r"$\mu_0\|y(t_f)\|e^{-\mu_1(t-t_f)}$")
ax.axvline(t_f, color="k", lw=0.8, ls=":", label=r"FE latch $t_f$")
ax.set_xlabel("t [s]")
ax.set_ylabel("combined error norm")
ax.set_title("Exponential envelope after the finite-excitation latch")
ax.legend()
fig.savefig(os.path.join(outdir, "exponential_envelope.png"), dpi=120)

fig, ax = plt.subplots(figsize=(9, 4))
ax.semilogy(log.t, np.maximum(report.V_series, 1e-300))
ax.set_xlabel("t [s]")
ax.set_ylabel("V")
ax.set_title("Lyapunov function along the concurrent-learning run")
fig.savefig(os.path.join(outdir, "envelope_lyapunov.png"), dpi=120)

print(f"figures written to {outdir}")
