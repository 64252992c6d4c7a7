"""dB / linear conversions."""

from __future__ import annotations

import math

import numpy as np


def to_db(x):
    """Linear power ratio to dB. Zero maps to -inf."""
    if np.ndim(x):
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(np.asarray(x, dtype=float))
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def to_linear(x_db):
    if np.ndim(x_db):
        return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)
    return 10.0 ** (x_db / 10.0)


def dbm_to_mw(p_dbm):
    return to_linear(p_dbm)


def mw_to_dbm(p_mw):
    return to_db(p_mw)


def dbm_to_watts(p_dbm: float) -> float:
    return to_linear(p_dbm) / 1000.0


def watts_to_dbm(p_w: float) -> float:
    return to_db(p_w * 1000.0)
