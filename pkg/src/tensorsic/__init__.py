"""Digital self-interference cancellation for full-duplex radios.

Linear, widely linear memory-polynomial and low-rank tensor (CSID) cancellers
with per-sample cost accounting.
"""

from .complexity import CostReport, csid_cost, linear_cost, measured_cost, poly_cost
from .csid import CsidModel, TrainConfig, cancel_full, predict_csid, train_csid
from .linear import LinearModel, fit_linear, predict_linear
from .poly import PolyModel, fit_poly, poly_basis, predict_poly
from .quantize import Codebook, QuantizerBank, build_input_indices, quantize_index, train_kmeans_1d
from .signal import (PERFECT_CANCELLATION, SiDataset, cancellation_db, load_dataset, save_dataset,
                     split_dataset)
from .synth import SynthConfig, apply_nonlinear_channel, generate_ofdm, make_dataset
from .tensor import als, cpd_eval, cpd_values

__version__ = "0.1.0"
