"""Configuration settings for the local-complexity toolkit."""

import os
from dotenv import load_dotenv

load_dotenv()

# Directory Settings
OUTPUT_DIR = os.getenv("LOCALCOMPLEXITY_OUTPUT_DIR", os.getenv("OUTPUT_DIR", "./output"))
DATA_DIR = os.getenv("LOCALCOMPLEXITY_DATA_DIR", "./data")

# Runtime Settings
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
DEFAULT_JOBS = int(os.getenv("LOCALCOMPLEXITY_JOBS", "1"))
DEFAULT_SEED = int(os.getenv("LOCALCOMPLEXITY_SEED", "0"))

# Physical models (couplings in units of J)
MODEL_PRESETS = {
    "tfim": {"J": 1.0, "h_x": 0.6, "h_z": 0.0},           # integrable, GGE data
    "chaotic": {"J": 1.0, "h_x": 1.152, "h_z": 0.974},    # weakly open, reconstruction
    "structured": {"J": 1.0, "h_x": 0.709, "h_z": 0.9042}, # structured-noise steady states
}

# Lagrange multipliers are drawn uniformly from [-LAGRANGE_RANGE/J, LAGRANGE_RANGE/J]
LAGRANGE_RANGE = 2.0

# Dense-memory limits (sites)
SIZE_LIMITS = {
    "dense_operator": 14,
    "gge": 12,
    "liouvillian": 7,
    "dense_null_space": 5,
    "circuit_min": 4,
    "circuit_max": 20,
    "support_max": 6,
    "observation_support_max": 4,
}

# Desk-scale system sizes
DEFAULT_SIZES = {
    "gge_L": 10,
    "lindblad_N": 6,
    "circuit_L": 16,
    "support": 3,
}

# Training parameters per data source (number of data, batch size, steps)
TRAINING_PRESETS = {
    "gge": {"n_data": 2000, "batch_size": 128, "steps": 250000},
    "lindblad": {"n_data": 200, "batch_size": 16, "steps": 250000},
    "circuit": {"n_data": 1000, "batch_size": 64, "steps": 50000},
}

# Desk-scale overrides applied on top of TRAINING_PRESETS
DESK_SCALE = {
    "width": 200,
    "steps": 50000,
}

NETWORK_DEFAULTS = {
    "encoder_widths": (400, 400),
    "decoder_widths": (400, 400),
    "output_activation": "linear",
    "eval_every": 500,
    "train_fraction": 0.8,
}

ADAM_DEFAULTS = {
    "lr": 5e-4,
    "beta1": 0.9,
    "beta2": 0.999,
    "eps": 1e-8,
}

TWONN_DEFAULTS = {
    "discard_fraction": 0.02,
    "windows": ((1.0, 1.5), (2.0, float("inf"))),
    "min_window_points": 50,
}

TSNE_DEFAULTS = {
    "perplexity": 30.0,
    "iterations": 1000,
    "learning_rate": 200.0,
    "initial_momentum": 0.5,
    "final_momentum": 0.8,
    "exaggeration": 12.0,
    "exaggeration_iterations": 250,
}

LINDBLAD_DEFAULTS = {
    "epsilon": 0.001,
    "tol": 1e-8,
    "max_iter": 5000,
    "degeneracy_threshold": 1e-10,
}

CIRCUIT_DEFAULTS = {
    "dt": 0.1,
    "steps": 200,
    "n_initial": 500,
    "fresh_odd_gate": True,
}

RECONSTRUCTION_DEFAULTS = {
    "k_neighbors": 10,
    "top_m": 5,
    "max_candidates": 6,
    "fd_step": 1e-5,
    "tol": 1e-9,
    "max_iter": 50,
    "condition_limit": 1e12,
    "prune_ratio": 1e-3,
    "low_signal_threshold": 1e-3,
    "min_converged_fraction": 0.25,
    "sweep_ratio_limit": 1e-2,
}

# Exit codes reported by the CLI
EXIT_CODES = {
    "ok": 0,
    "usage": 1,
    "numerical": 2,
}
