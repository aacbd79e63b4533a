"""Shared helpers for building random test networks and finite differences."""

import numpy as np

from bnlab.net import NetParams, forward, mse_cost


def random_net(rng, widths=None, slope_a=0.0, bias_scale=0.3, depth_range=(2, 4)):
    """Small random network with fan-in scaled weights and nonzero biases."""
    if widths is None:
        depth = int(rng.integers(depth_range[0], depth_range[1] + 1))
        widths = [int(rng.integers(2, 6)) for _ in range(depth + 1)]
    layers = []
    for ell in range(1, len(widths)):
        n_out, n_in = widths[ell], widths[ell - 1]
        w = rng.standard_normal((n_out, n_in)) * np.sqrt(2.0 / n_in)
        b = rng.standard_normal(n_out) * bias_scale
        layers.append((w, b))
    return NetParams(layers, slope_a)


def generic_point(params, rng, min_gap=1e-4, tries=100):
    """Sample an input whose pre-activations are all safely away from zero."""
    for _ in range(tries):
        x = rng.standard_normal(params.d_in)
        cache = forward(params, x)
        gap = min(np.abs(z).min() for z in cache.preacts)
        if gap > min_gap:
            return x
    raise AssertionError("could not find a generic point")


def fd_cost_grad(params, x, y, lam, h=1e-6):
    """Central finite differences of the regularized cost, one coordinate at a time."""
    grads = []
    for idx in range(params.depth):
        w, b = params.layers[idx]
        dw = np.zeros_like(w)
        for pos in np.ndindex(*w.shape):
            for sign in (+1.0, -1.0):
                p = params.copy()
                p.layers[idx][0][pos] += sign * h
                c = mse_cost(p, x, y) + lam * p.squared_norm()
                dw[pos] += sign * c
            dw[pos] /= 2 * h
        db = np.zeros_like(b)
        for pos in range(b.shape[0]):
            for sign in (+1.0, -1.0):
                p = params.copy()
                p.layers[idx][1][pos] += sign * h
                c = mse_cost(p, x, y) + lam * p.squared_norm()
                db[pos] += sign * c
            db[pos] /= 2 * h
        grads.append((dw, db))
    return grads
