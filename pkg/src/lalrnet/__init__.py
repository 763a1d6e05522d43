"""Feedforward regression networks trained with a Lipschitz adaptive learning rate."""
from .activations import ActivationKind, activate, derivative, fit_arelu
from .data import Dataset, load_csv, normalize_range, subsample, synth_regression
from .experiment import ExperimentConfig, MetricsLog, aggregate, emit_outputs, run_experiment
from .network import Network, backward, forward, init_network, mae, mse_loss, sgd_step
from .schedulers import (
    DecayLR,
    FixedLR,
    LipschitzConstants,
    LipschitzLR,
    compute_constants,
    decay_lr,
    fixed_lr,
    linreg_lipschitz,
    lipschitz_lr,
)

__version__ = "0.1.0"
