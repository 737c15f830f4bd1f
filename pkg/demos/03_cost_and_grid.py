"""
What a cancelled sample costs, and a small grid search
======================================================

Operation counts per output sample for each canceller, counted two ways:
closed forms, and an instrumented evaluation of a real model. Then a
grid search in the same shape the CLI runs, ending in the comparison table.
"""

import numpy as np

from tensorsic import experiment as ex
from tensorsic.complexity import csid_cost, csid_schedule_cost, linear_cost, measured_cost, poly_cost
from tensorsic.linear import LinearModel
from tensorsic.synth import SynthConfig, make_dataset

print(linear_cost(2).to_csv(), end="")
print(poly_cost(7, 3).to_csv(header=False), end="")
print(csid_cost(4, 2, 32).to_csv(header=False), end="")

# The instrumented count of a linear model agrees with its closed form
rng = np.random.default_rng(0)
probe = rng.standard_normal(16) + 1j * rng.standard_normal(16)
print("instrumented linear L=2:", measured_cost(LinearModel(np.array([1, 0.5j])), probe).counts())

# For the tensor canceller the executed schedule costs fewer
# multiplications than the published closed form at F=4, L=2 (and more at
# other shapes); additions and memory agree.
for F, L in ((4, 2), (1, 1), (5, 2)):
    print(f"F={F} L={L}: closed {csid_cost(F, L).counts()}  executed {csid_schedule_cost(F, L).counts()}")

# %% A small grid with validation selection
cfg = SynthConfig(n_carriers=512, n_symbols=6)
data = make_dataset(cfg)
poly_rows = ex.run_grid(ex.ExperimentSpec(canceller="poly", synth=cfg, P=(7,), L=(3,)), data)
csid_rows = ex.run_grid(ex.ExperimentSpec(canceller="csid", synth=cfg, F=(4,), I=(32,), mu=(1e-3, 1e-2),
                                          rho=(1e-3,), max_sweeps=30), data)
print(ex.rows_to_csv(poly_rows + csid_rows))

row = {k: str(v) for k, v in csid_rows[0].items()}
print(ex.table_to_csv(ex.report_comparison({k: str(v) for k, v in poly_rows[0].items()}, row)))
