"""Reference results for the bundled nine-bus fixture.

Eigenvalue lists are the reference spectra of J_LF + J_LF^T (print
precision two to three decimals) for the base and lossless cases, without
and with the reference Q-V regulation set. The lossless rows are
evaluated at the base-case operating point (the lossless simplification
keeps the measured equilibrium). The verdict grid is the expected
classification over every model and variant column when the reference
regulation set is offered.
"""

from __future__ import annotations

PASSIVE = "passive"
NON_PASSIVE = "non-passive"
REGULATED = "passive-after-regulation"

# Reference Q-V regulation: 0.65 pu at every controllable-device bus.
REG_BUSES = (1, 2, 3, 5, 6, 8)
REG_KQV = 0.65

# Default absolute per-eigenvalue tolerance against the printed references.
EIG_TOL = 0.05

TABLE_EIGS: dict[str, tuple[float, ...]] = {
    "base": (
        -0.84, 0.0, 7.52, 8.50, 10.15, 12.93, 31.71, 34.74, 34.95,
        36.29, 41.37, 42.8, 93.51, 94.52, 107.94, 108.29, 115.46, 115.76,
    ),
    "base_regulated": (
        0.0, 0.025, 7.87, 8.82, 10.42, 13.13, 32.43, 35.06, 35.44,
        36.53, 42.1, 42.88, 93.92, 95.08, 108.29, 109.06, 115.72, 116.61,
    ),
    "lossless": (
        -0.84, 0.0, 7.8, 8.83, 10.32, 13.11, 32.72, 35.46, 35.74,
        36.79, 41.72, 43.16, 94.37, 95.34, 109.0, 109.33, 116.92, 117.26,
    ),
    "lossless_regulated": (
        0.0, 0.027, 8.15, 9.15, 10.59, 13.31, 33.44, 35.86, 36.11,
        37.07, 42.45, 43.25, 94.77, 95.91, 109.33, 110.1, 117.2, 118.09,
    ),
}

# Expected verdicts, keyed like passcheck.classify_grid output.
EXPECTED_GRID: dict[str, dict[str, str]] = {
    "I": {
        "wideband": PASSIVE,
        "lossy_b": PASSIVE,
        "lossless_b": PASSIVE,
        "lossy_nob": PASSIVE,
        "lossless_nob": PASSIVE,
    },
    "II": {
        "wideband": NON_PASSIVE,
        "lossy_b/coupled": REGULATED,
        "lossy_b/decoupled": REGULATED,
        "lossless_b/coupled": REGULATED,
        "lossless_b/decoupled": REGULATED,
        "lossy_nob/coupled": REGULATED,
        "lossy_nob/decoupled": REGULATED,
        "lossless_nob/coupled": REGULATED,
        "lossless_nob/decoupled": PASSIVE,
    },
    "III": {
        "wideband": NON_PASSIVE,
        "lossy_b/coupled": NON_PASSIVE,
        "lossy_b/decoupled": NON_PASSIVE,
        "lossless_b/coupled": NON_PASSIVE,
        "lossless_b/decoupled": REGULATED,
        "lossy_nob/coupled": NON_PASSIVE,
        "lossy_nob/decoupled": NON_PASSIVE,
        "lossless_nob/coupled": NON_PASSIVE,
        "lossless_nob/decoupled": PASSIVE,
    },
    "IV": {
        "wideband": NON_PASSIVE,
        "lossy_b/coupled": NON_PASSIVE,
        "lossy_b/decoupled": NON_PASSIVE,
        "lossless_b/coupled": REGULATED,
        "lossless_b/decoupled": REGULATED,
        "lossy_nob/coupled": NON_PASSIVE,
        "lossy_nob/decoupled": NON_PASSIVE,
        "lossless_nob/coupled": REGULATED,
        "lossless_nob/decoupled": PASSIVE,
    },
}
