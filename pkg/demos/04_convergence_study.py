# %% [markdown]
# # MC vs QMC vs RQMC vs RQMC+CF
# Every method gets the same number of integrand evaluations per replicate.
# The CLI equivalent is ``cfqmc study --out-dir results``.

# %%
from cfqmc.bench import StudyConfig, convergence_study

report = convergence_study(StudyConfig(function="fig1", replicates=20))
for method, fit in report.slopes.items():
    print(f"{method:>8}: rmse ~ N^{fit.slope:.2f}")

# %%
print(f"{'N':>6} " + " ".join(f"{m:>10}" for m in report.config.methods))
for b in report.config.budgets:
    print(f"{b:>6} " + " ".join(f"{report.row(m, b).rmse:10.2e}" for m in report.config.methods))

# %%
# plot-ready data: results/plot.dat holds log2 columns
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    for m in report.config.methods:
        rows = report.rows_for(m)
        plt.errorbar([r.budget for r in rows], [abs(r.mean_estimate - r.true_integral) for r in rows],
                     yerr=[r.std for r in rows], label=m, marker="o")
    plt.xscale("log", base=2)
    plt.yscale("log")
    plt.legend()
    plt.savefig("convergence.png")
