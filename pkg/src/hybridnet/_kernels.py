"""Hot loop: aggregate co-channel interference at many victims.

Two interchangeable implementations with identical semantics:

* ``interference_mw_numpy`` broadcasts over the (victim, transmitter) grid.
* ``interference_mw_numba`` is the same computation as an ``@njit`` loop.

``interference_mw`` is bound to the numba version when numba imports and
``HYBRIDNET_NUMBA`` is not set to ``0``; otherwise to the numpy version.
"""

from __future__ import annotations

import math
import os

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# Near-field floor for interference paths; two nodes never sit closer than this.
MIN_DISTANCE_M = 1.0


def _angle_inside(angle_deg, boresight_deg, half_beam_deg):
    diff = np.mod(angle_deg - boresight_deg, 360.0)
    diff = np.where(diff > 180.0, 360.0 - diff, diff)
    return diff <= half_beam_deg


def interference_mw_numpy(
    vx, vy, vbore, tx, ty, tbore, tx_power_dbm, active, shadow_db,
    freq_hz, att_db_per_km, tx_main_dbi, rx_main_dbi, side_dbi, half_beam_deg,
):
    dx = vx[:, None] - tx[None, :]
    dy = vy[:, None] - ty[None, :]
    dist = np.maximum(np.hypot(dx, dy), MIN_DISTANCE_M)
    # direction transmitter -> victim, and victim -> transmitter
    ang_tv = np.degrees(np.arctan2(dy, dx))
    ang_vt = ang_tv + 180.0
    g_tx = np.where(_angle_inside(ang_tv, tbore[None, :], half_beam_deg), tx_main_dbi, side_dbi)
    g_rx = np.where(_angle_inside(ang_vt, vbore[:, None], half_beam_deg), rx_main_dbi, side_dbi)
    fspl = 20.0 * np.log10(4.0 * np.pi * dist * freq_hz / SPEED_OF_LIGHT)
    p_dbm = tx_power_dbm[None, :] + g_tx + g_rx - fspl - att_db_per_km * dist / 1000.0 - shadow_db
    p_mw = np.where(active, np.power(10.0, p_dbm / 10.0), 0.0)
    return p_mw.sum(axis=1)


def _interference_mw_loop(
    vx, vy, vbore, tx, ty, tbore, tx_power_dbm, active, shadow_db,
    freq_hz, att_db_per_km, tx_main_dbi, rx_main_dbi, side_dbi, half_beam_deg,
):
    n_v = vx.shape[0]
    n_t = tx.shape[0]
    out = np.zeros(n_v)
    for i in range(n_v):
        acc = 0.0
        for j in range(n_t):
            if not active[i, j]:
                continue
            dx = vx[i] - tx[j]
            dy = vy[i] - ty[j]
            dist = max(math.hypot(dx, dy), MIN_DISTANCE_M)
            ang_tv = math.degrees(math.atan2(dy, dx))
            ang_vt = ang_tv + 180.0

            diff = (ang_tv - tbore[j]) % 360.0
            if diff > 180.0:
                diff = 360.0 - diff
            g_tx = tx_main_dbi if diff <= half_beam_deg else side_dbi

            diff = (ang_vt - vbore[i]) % 360.0
            if diff > 180.0:
                diff = 360.0 - diff
            g_rx = rx_main_dbi if diff <= half_beam_deg else side_dbi

            fspl = 20.0 * math.log10(4.0 * math.pi * dist * freq_hz / SPEED_OF_LIGHT)
            p_dbm = tx_power_dbm[j] + g_tx + g_rx - fspl - att_db_per_km * dist / 1000.0 - shadow_db[i, j]
            acc += 10.0 ** (p_dbm / 10.0)
        out[i] = acc
    return out


try:
    import numba

    interference_mw_numba = numba.njit(cache=True)(_interference_mw_loop)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    interference_mw_numba = None
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("HYBRIDNET_NUMBA", "1") != "0"


BACKEND = "numba" if numba_enabled() else "numpy"
interference_mw = interference_mw_numba if BACKEND == "numba" else interference_mw_numpy
