"""Shipped demo configurations.

Every preset here halts with all runtime certifications passing; they are the
configurations the golden traces and the acceptance suite run.  The duel
presets are engineered so the run exhibits at least one genuine certified
progress step before halting (cross-monitoring odd-max-bit blocks on the
threshold side, cross-reading accept-on-empty queries on the parallel side).
"""

from __future__ import annotations

PP_PRESETS: dict[str, dict] = {
    # no machines at all: row 0 is vacuously insensitive, halt in one step
    "zero": {
        "n": 1, "machine_count": 0, "rho": 2, "K": 0, "mode": "plain",
        "seed": 0, "machines": [],
    },
    # constant accept/reject machines never flip: halt in one step
    "constants": {
        "n": 1, "machine_count": 1, "rho": 2, "K": None, "mode": "plain",
        "seed": 0, "machines": [
            {"kind": "const", "value": 1},
            {"kind": "const", "value": -3},
        ],
    },
    # two odd-max-bit instances monitoring each other's column across both
    # rows: every row starts sensitive, forcing one certified doubling before
    # the halting encode
    "oddmaxbit-duel": {
        "n": 1, "machine_count": 1, "rho": 1, "K": None, "mode": "plain",
        "seed": 3, "machines": [
            {"kind": "oddmaxbit", "cells": [[1, 1], [0, 1]]},
            {"kind": "oddmaxbit", "cells": [[0, 0], [1, 0]]},
        ],
    },
}

PAR_PRESETS: dict[str, dict] = {
    "zero": {
        "n": 1, "machine_count": 0, "rho": 2, "seed": 0, "machines": [],
    },
    # query-free machines with constant output maps
    "constants": {
        "n": 1, "machine_count": 1, "rho": 2, "seed": 0, "machines": [
            {"queries": [], "z": 2, "outputs": [{"": 1}, {"": 1}]},
            {"queries": [], "z": 2, "outputs": [{"": 0}, {"": 0}]},
        ],
    },
    # accept-on-empty single-path queries cross-reading the other column:
    # both rows start sensitive, one W step precedes the halt
    "duel": {
        "n": 1, "machine_count": 1, "rho": 1, "seed": 0, "machines": [
            {"queries": [[[[[0, 1], 0]]]], "z": 2,
             "outputs": [{"0": 0, "1": 1}, {"0": 0, "1": 1}]},
            {"queries": [[[[[1, 0], 0]]]], "z": 2,
             "outputs": [{"0": 0, "1": 1}, {"0": 0, "1": 1}]},
        ],
    },
    # the remark-(6) machine: 2 adaptive queries expanded to 3 nonadaptive
    # ones (tree order: first, if0-branch, if1-branch), plus a constant column
    "remark6": {
        "n": 1, "machine_count": 1, "rho": 2, "seed": 0, "machines": [
            {"queries": [
                [[[[0, 0], 1]]],
                [[[[1, 0], 1]]],
                [[[[1, 1], 1]]],
            ], "z": 1,
                "outputs": [{
                    "000": 0, "001": 0, "010": 1, "011": 1,
                    "100": 0, "101": 1, "110": 0, "111": 1,
                }]},
            {"queries": [], "z": 1, "outputs": [{"": 1}]},
        ],
    },
}

DIAG_PRESETS: dict[str, dict] = {
    "n2s1": {"n": 2, "s": 1},
    "n3s1": {"n": 3, "s": 1},
}

COUNT_PRESET: dict = {
    "m": 10, "threshold": 3, "trials": 20, "delta": "1/10", "seed": 7,
    "hash_draws": 4, "reps": 3,
}
