"""
Linear and polynomial cancellers on a synthetic channel
=======================================================

A short walk through the baseline cancellers: generate an OFDM transmit
signal, push it through a memory-polynomial channel with noise, then see
how much of the received self-interference each model removes.
"""

import numpy as np

from tensorsic.linear import fit_linear, predict_linear
from tensorsic.poly import fit_poly, predict_poly
from tensorsic.signal import cancellation_db
from tensorsic.synth import SynthConfig, make_dataset, papr_db

# A smaller capture than the default keeps this quick; the channel is the
# default one (two lags, third order) with noise 40 dB below the signal.
cfg = SynthConfig(n_carriers=1024, n_symbols=6)
ds = make_dataset(cfg)
print(f"{len(ds)} samples, PAPR {papr_db(ds.tx):.1f} dB")
print("splits:", ds.train, ds.val, ds.test)

# %% Linear canceller: an L-tap FIR fitted by least squares on the train split
test = ds.test
y = ds.rx[test.start:test.stop]
for L in (1, 2, 3):
    lin = fit_linear(ds.tx, ds.rx, ds.train, L)
    print(f"linear L={L}: {cancellation_db(y, predict_linear(lin, ds.tx, test)):.2f} dB   taps {np.round(lin.taps, 3)}")

# With two lags the linear part of the channel is captured; what is left is
# the PA non-linearity plus noise.
lin = fit_linear(ds.tx, ds.rx, ds.train, 2)
lin_est = predict_linear(lin, ds.tx, test)
after_linear = y - lin_est

# %% Polynomial canceller: widely linear memory polynomial, odd orders only
for P in (1, 3, 5, 7):
    poly = fit_poly(ds.tx, ds.rx, ds.train, P, 2)
    est = predict_poly(poly, ds.tx, test)
    total = cancellation_db(y, est)
    nl = cancellation_db(after_linear, est - lin_est)
    print(f"poly P={P}: total {total:.2f} dB, beyond linear {nl:.2f} dB  ({poly.coef.size} coefficients)")

# P=3 already matches the channel; the recovered coefficients sit next to
# the truth, the difference being the noise.
poly = fit_poly(ds.tx, ds.rx, ds.train, 3, 2)
for key, truth in cfg.pa_coefficients.items():
    print(key, np.round(truth, 4), np.round(poly.coefficients[key], 4))
