"""
Tensor canceller: quantize, complete, cancel
============================================

The tensor canceller treats the non-linear residual as a function of the
quantized real and imaginary parts of the last L transmit samples, and
fits it as a low-rank (CP) tensor by alternating least squares.
"""

import numpy as np

from tensorsic.csid import TrainConfig, cancel_full, train_csid
from tensorsic.linear import fit_linear
from tensorsic.quantize import input_indices
from tensorsic.synth import SynthConfig, make_dataset

ds = make_dataset(SynthConfig(n_carriers=1024, n_symbols=6))
lin = fit_linear(ds.tx, ds.rx, ds.train, 2)

# %% One model, step by step
model = train_csid(ds.tx, ds.rx, ds.train, TrainConfig(F=4, I=32, mu=1e-2, rho=1e-3, max_sweeps=60), lin)
print("tensor shape", model.levels, "rank", model.F)
print("first code book (Re, lag 0):", np.round(model.bank.codebooks[0].centroids[:6], 3), "...")

# Every sample becomes a 2L-tuple of level indices
print("index tuples for samples 100..103:\n", input_indices(ds.tx, range(100, 104), model.bank))

# The objective drops fast in the first sweeps and then flattens
h = np.asarray(model.history)
print("objective:", " ".join(f"{v:.3g}" for v in h[[0, 1, 2, 5, 10, -1]]))

for split in ("val", "test"):
    _, nl, total = cancel_full(model, ds.tx, ds.rx, ds.split(split))
    print(f"{split}: beyond linear {nl:.2f} dB, total {total:.2f} dB")

# %% Rank and resolution
# More levels resolve the non-linearity more finely but leave fewer
# samples per tensor row; rank buys expressiveness. Selection is on
# validation only. On this short capture (about 20k training samples)
# F=4 with 64 levels already spreads the data too thin; the default
# synthetic capture is four times longer.
for F in (1, 2, 4):
    for I in (16, 32, 64):
        m = train_csid(ds.tx, ds.rx, ds.train, TrainConfig(F=F, I=I, mu=1e-2, rho=1e-3, max_sweeps=40), lin)
        _, nl, _ = cancel_full(m, ds.tx, ds.rx, ds.val)
        print(f"F={F} I={I:2d}: val beyond linear {nl:5.2f} dB")
