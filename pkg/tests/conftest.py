"""Shared test oracles, independent of the library code paths they check."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.optimize import brentq


def real_well_bound_states(depth: float, R: float):
    """Bound-state energies of the real well -depth * 1_[-R, R], by bisection.

    Uses the pole-free matching forms
        even: k sin(kR) - m cos(kR) = 0,
        odd:  k cos(kR) + m sin(kR) = 0,
    with m = sqrt(depth - k^2), scanned for sign changes on a dense grid.
    Independent of the package's secular functions.
    """
    kmax = math.sqrt(depth)

    def g_even(k):
        return k * math.sin(k * R) - math.sqrt(depth - k * k) * math.cos(k * R)

    def g_odd(k):
        return k * math.cos(k * R) + math.sqrt(depth - k * k) * math.sin(k * R)

    energies = []
    for g in (g_even, g_odd):
        grid = np.linspace(1e-9, kmax - 1e-12, 4001)
        vals = np.array([g(k) for k in grid])
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                k0 = grid[i]
            elif vals[i] * vals[i + 1] < 0:
                k0 = brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16)
            else:
                continue
            energies.append(k0 * k0 - depth)
    return sorted(energies)


def real_well_parity_states(depth: float, R: float, parity: str):
    """Same oracle, restricted to one parity."""
    kmax = math.sqrt(depth)

    def g_even(k):
        return k * math.sin(k * R) - math.sqrt(depth - k * k) * math.cos(k * R)

    def g_odd(k):
        return k * math.cos(k * R) + math.sqrt(depth - k * k) * math.sin(k * R)

    g = g_even if parity == "even" else g_odd
    grid = np.linspace(1e-9, kmax - 1e-12, 4001)
    vals = np.array([g(k) for k in grid])
    energies = []
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0:
            k0 = brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16)
            energies.append(k0 * k0 - depth)
    return sorted(energies)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
