"""Fully connected networks with the leaky-homogeneous nonlinearity.

The nonlinearity is ``sigma_a(t) = t`` for ``t >= 0`` and ``a*t`` otherwise,
with slope ``a`` in (-1, 1); ``a = 0`` is the ReLU. The network maps an input
to the pre-activation of its last layer (no nonlinearity on the output).

Inputs are batched as columns: an input batch is ``d_in x N``. Everything in
this module is a pure function of its arguments; ``NetParams`` instances are
treated as immutable values after construction.

Derivative convention at a kink: ``sigma_a'(0) = 1`` (the right limit), so
Jacobians are exact for the active linear region on that side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ResourceError

NTK_GRAM_MAX_SIZE = 2000


@dataclass
class NetParams:
    """Ordered (weight, bias) pairs plus the nonlinearity slope.

    Weight ``l`` has shape ``n_l x n_{l-1}``; bias ``l`` has length ``n_l``.
    """

    layers: list[tuple[np.ndarray, np.ndarray]]
    slope_a: float = 0.0

    def __post_init__(self):
        if not self.layers:
            raise InputError("network needs at least one layer")
        if not -1.0 < self.slope_a < 1.0:
            raise InputError(f"slope_a must lie in (-1, 1), got {self.slope_a}")
        norm_layers = []
        prev = None
        for idx, (w, b) in enumerate(self.layers, start=1):
            w = np.asarray(w, dtype=float)
            b = np.asarray(b, dtype=float).reshape(-1)
            if w.ndim != 2:
                raise InputError(f"layer {idx}: weight must be 2-D")
            if b.shape[0] != w.shape[0]:
                raise InputError(
                    f"layer {idx}: bias length {b.shape[0]} != rows {w.shape[0]}"
                )
            if prev is not None and w.shape[1] != prev:
                raise InputError(
                    f"layer {idx}: expects {w.shape[1]} inputs, previous layer emits {prev}"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise InputError(f"layer {idx}: non-finite parameters")
            prev = w.shape[0]
            norm_layers.append((w, b))
        self.layers = norm_layers

    @classmethod
    def _wrap(cls, layers, slope_a: float) -> "NetParams":
        """Construct without validation (hot paths building derived values)."""
        obj = object.__new__(cls)
        obj.layers = layers
        obj.slope_a = slope_a
        return obj

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def widths(self) -> list[int]:
        return [self.layers[0][0].shape[1]] + [w.shape[0] for w, _ in self.layers]

    @property
    def d_in(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def d_out(self) -> int:
        return self.layers[-1][0].shape[0]

    def squared_norm(self) -> float:
        return float(
            sum(np.sum(w * w) + np.sum(b * b) for w, b in self.layers)
        )

    def copy(self) -> "NetParams":
        return NetParams(
            [(w.copy(), b.copy()) for w, b in self.layers], self.slope_a
        )


def sigma(x: np.ndarray, a: float) -> np.ndarray:
    return np.where(x >= 0.0, x, a * x)


def dsigma(x: np.ndarray, a: float) -> np.ndarray:
    """Entrywise derivative mask with values in {1, a}; sigma'(0) = 1."""
    return np.where(x >= 0.0, 1.0, a)


@dataclass
class ForwardCache:
    """All pre-activations and activations of one forward pass.

    ``preacts[l-1]`` is the pre-activation of layer ``l`` (so the network
    output is ``preacts[-1]``); ``act(l)`` gives the activation feeding layer
    ``l+1``, with ``act(0)`` being the input itself.
    """

    input: np.ndarray
    preacts: list[np.ndarray]
    slope_a: float
    _patterns: list[np.ndarray] | None = field(default=None, repr=False)

    @property
    def output(self) -> np.ndarray:
        return self.preacts[-1]

    @property
    def depth(self) -> int:
        return len(self.preacts)

    def act(self, ell: int) -> np.ndarray:
        if ell == 0:
            return self.input
        return sigma(self.preacts[ell - 1], self.slope_a)

    def pattern(self, ell: int) -> np.ndarray:
        """Derivative mask D_l with entries in {1, slope_a}, 1 <= l < depth."""
        if self._patterns is None:
            self._patterns = [None] * (self.depth - 1)
        if self._patterns[ell - 1] is None:
            self._patterns[ell - 1] = dsigma(self.preacts[ell - 1], self.slope_a)
        return self._patterns[ell - 1]


def activation_patterns(cache: ForwardCache) -> list[np.ndarray]:
    """Per-layer sign masks D_1 .. D_{L-1} for the cached batch."""
    return [cache.pattern(ell) for ell in range(1, cache.depth)]


def _as_batch(x, d_in: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if x.ndim != 2 or x.shape[0] != d_in:
        raise InputError(f"input must have {d_in} rows, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("input has non-finite entries")
    return x


def forward(params: NetParams, x) -> ForwardCache:
    """Forward pass; inputs are columns of ``x``."""
    x = _as_batch(x, params.d_in)
    preacts = []
    a = params.slope_a
    h = x
    last = params.depth - 1
    for ell, (w, b) in enumerate(params.layers):
        z = w @ h + b[:, None]
        preacts.append(z)
        if ell != last:
            h = sigma(z, a)
    return ForwardCache(input=x, preacts=preacts, slope_a=a)


def jacobian(params: NetParams, x) -> np.ndarray:
    """Input-output Jacobian ``d_out x d_in`` at a single point."""
    x = np.asarray(x, dtype=float).reshape(-1)
    cache = forward(params, x)
    L = params.depth
    j = params.layers[L - 1][0]
    for ell in range(L - 1, 0, -1):
        d = cache.pattern(ell)[:, 0]
        j = (j * d) @ params.layers[ell - 1][0]
    return j


def partial_jacobian(params: NetParams, cache: ForwardCache, ell: int, x_col: int = 0) -> np.ndarray:
    """Jacobian of the map from pre-activation ``l`` to the network output.

    Equals ``W_L D_{L-1} W_{L-1} ... W_{l+1} D_l`` at the cached point; the
    identity for ``l == L``.
    """
    L = params.depth
    if not 1 <= ell <= L:
        raise InputError(f"layer index {ell} out of range 1..{L}")
    d_out = params.d_out
    if ell == L:
        return np.eye(d_out)
    j = params.layers[L - 1][0]
    for m in range(L - 1, ell, -1):
        j = (j * cache.pattern(m)[:, x_col]) @ params.layers[m - 1][0]
    return j * cache.pattern(ell)[:, x_col]


def mse_cost(params: NetParams, x, y) -> float:
    """Mean over samples of the squared output error."""
    cache = forward(params, x)
    y = _as_batch(y, params.d_out)
    r = cache.output - y
    return float(np.sum(r * r) / r.shape[1])


def grad(params: NetParams, x, y, lam: float = 0.0) -> NetParams:
    """Exact gradient of ``mse_cost + lam * ||theta||^2`` by reverse accumulation.

    Returns a NetParams-shaped container holding (dW, db) pairs.
    """
    cache = forward(params, x)
    y = _as_batch(y, params.d_out)
    n = y.shape[1]
    L = params.depth
    delta = 2.0 * (cache.output - y) / n
    grads: list[tuple[np.ndarray, np.ndarray] | None] = [None] * L
    for ell in range(L, 0, -1):
        w, b = params.layers[ell - 1]
        act = cache.act(ell - 1)
        dw = delta @ act.T + 2.0 * lam * w
        db = delta.sum(axis=1) + 2.0 * lam * b
        grads[ell - 1] = (dw, db)
        if ell > 1:
            delta = (w.T @ delta) * cache.pattern(ell - 1)
    return NetParams._wrap(grads, params.slope_a)


def _output_jacobians(params: NetParams, cache: ForwardCache, x_col: int = 0) -> list[np.ndarray]:
    """J(pre-activation l -> output) for every layer l = 1..L, one backward pass."""
    L = params.depth
    js: list[np.ndarray] = [None] * L
    j = np.eye(params.d_out)
    js[L - 1] = j
    for ell in range(L - 1, 0, -1):
        j = (j @ params.layers[ell][0]) * cache.pattern(ell)[:, x_col]
        js[ell - 1] = j
    return js


def ntk_trace(params: NetParams, x, include_bias: bool = False) -> tuple[float, np.ndarray]:
    """Trace of the tangent kernel at one point via the layer decomposition.

    Per layer the weight-gradient mass is
    ``||act_{l-1}(x)||^2 * ||J(pre_l -> f)(x)||_F^2``; with ``include_bias``
    the bias mass ``||J(pre_l -> f)(x)||_F^2`` is added. Returns the total and
    the per-layer breakdown.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    cache = forward(params, x)
    js = _output_jacobians(params, cache)
    terms = np.zeros(params.depth)
    for ell in range(1, params.depth + 1):
        a = cache.act(ell - 1)[:, 0]
        jf2 = float(np.sum(js[ell - 1] ** 2))
        terms[ell - 1] = float(a @ a) * jf2
        if include_bias:
            terms[ell - 1] += jf2
    return float(terms.sum()), terms


def ntk_trace_direct(params: NetParams, x, include_bias: bool = False) -> float:
    """Independent route: sum of squared parameter gradients over all outputs.

    Runs one loss backprop per output coordinate (with the target shifted so
    the loss gradient at the output is exactly that coordinate's unit vector)
    and accumulates squared parameter gradients, so it exercises a different
    code path than the layer-decomposition formula.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    out = forward(params, x).output
    total = 0.0
    for o in range(params.d_out):
        y = out.copy()
        y[o, 0] -= 0.5  # makes the backprop seed 2*(f - y) equal to e_o
        g = grad(params, x, y, lam=0.0)
        for dw, db in g.layers:
            total += float(np.sum(dw * dw))
            if include_bias:
                total += float(np.sum(db * db))
    return total


def ntk_gram(params: NetParams, x_batch, include_bias: bool = False) -> np.ndarray:
    """Tangent-kernel Gram matrix over a batch, shape ``(N*d_out, N*d_out)``.

    Symmetric positive semidefinite; guarded to ``N*d_out <= 2000``.
    """
    x = _as_batch(x_batch, params.d_in)
    n = x.shape[1]
    d_out = params.d_out
    size = n * d_out
    if size > NTK_GRAM_MAX_SIZE:
        raise ResourceError(f"NTK Gram of size {size} exceeds guard {NTK_GRAM_MAX_SIZE}")
    cache = forward(params, x)
    L = params.depth
    gram = np.zeros((n, d_out, n, d_out))
    # batched backward recursion: q[i] = J(pre_l -> f)(x_i)
    q = np.broadcast_to(np.eye(d_out), (n, d_out, d_out)).copy()
    for ell in range(L, 0, -1):
        act = cache.act(ell - 1)  # n_{l-1} x N
        k_act = act.T @ act  # N x N
        t = np.einsum("iom,jpm->iojp", q, q)
        gram += t * k_act[:, None, :, None]
        if include_bias:
            gram += t
        if ell > 1:
            q = np.einsum("iom,mk->iok", q, params.layers[ell - 1][0])
            q = q * cache.pattern(ell - 1).T[:, None, :]
    g = gram.reshape(size, size)
    return (g + g.T) / 2.0


def ntk_bilinear_2nd_derivative(params: NetParams, x, u, v) -> float:
    """Mixed second derivative of the pointwise kernel along unit directions.

    Inside a fixed linear region the value is
    ``sum_l ||J(act_{l-1})(x) u||^2 * ||J(pre_l -> f)(x)^T v||^2``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    if abs(u @ u - 1.0) > 1e-8 or abs(v @ v - 1.0) > 1e-8:
        raise InputError("u and v must be unit vectors")
    cache = forward(params, x)
    L = params.depth
    # forward direction vectors p_l = J(act_l)(x) u, with p_0 = u
    p = [u]
    vec = u
    for ell in range(1, L):
        vec = (params.layers[ell - 1][0] @ vec) * cache.pattern(ell)[:, 0]
        p.append(vec)
    # backward direction vectors q_l = J(pre_l -> f)(x)^T v, with q_L = v
    q = [None] * (L + 1)
    q[L] = v
    vec = v
    for ell in range(L - 1, 0, -1):
        vec = (params.layers[ell][0].T @ vec) * cache.pattern(ell)[:, 0]
        q[ell] = vec
    total = 0.0
    for ell in range(1, L + 1):
        pe = p[ell - 1]
        qe = q[ell]
        total += float(pe @ pe) * float(qe @ qe)
    return total


def balancedness_residual(params: NetParams) -> float:
    """Max per-neuron violation of incoming-vs-outgoing squared norm equality.

    Zero means every neuron satisfies
    ``||W_l[i,:]||^2 + b_l[i]^2 == ||W_{l+1}[:,i]||^2``.
    """
    worst = 0.0
    for ell in range(params.depth - 1):
        w, b = params.layers[ell]
        w_next = params.layers[ell + 1][0]
        incoming = np.sum(w * w, axis=1) + b * b
        outgoing = np.sum(w_next * w_next, axis=0)
        worst = max(worst, float(np.abs(incoming - outgoing).max()))
    return worst


# ---------------------------------------------------------------------------
# serialization

_MAGIC = "BNLAB1"


def _fmt(x: float) -> str:
    return repr(float(x))


def save_net(params: NetParams, path) -> None:
    """Write a network to the textual weight format (bit-exact round trip).

    Layout: magic line, depth, widths, slope (decimal), then per layer the
    weight rows in row-major order followed by one bias line.
    """
    widths = params.widths
    with open(path, "w") as fh:
        fh.write(f"{_MAGIC}\n")
        fh.write(f"depth {params.depth}\n")
        fh.write("widths " + " ".join(str(n) for n in widths) + "\n")
        fh.write(f"slope {_fmt(params.slope_a)}\n")
        for idx, (w, b) in enumerate(params.layers, start=1):
            fh.write(f"layer {idx}\n")
            for row in w:
                fh.write(" ".join(_fmt(v) for v in row) + "\n")
            fh.write("bias " + " ".join(_fmt(v) for v in b) + "\n")


def load_net(path) -> NetParams:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != _MAGIC:
        raise InputError(f"not a {_MAGIC} weight file: {path}")
    try:
        depth = int(lines[1].split()[1])
        widths = [int(t) for t in lines[2].split()[1:]]
        slope = float(lines[3].split()[1])
    except (IndexError, ValueError) as exc:
        raise InputError(f"malformed weight file header: {path}") from exc
    if len(widths) != depth + 1:
        raise InputError("widths line inconsistent with depth")
    pos = 4
    layers = []
    for idx in range(1, depth + 1):
        if pos >= len(lines) or lines[pos] != f"layer {idx}":
            raise InputError(f"expected 'layer {idx}' at line {pos + 1}")
        pos += 1
        rows = []
        for _ in range(widths[idx]):
            rows.append([float(t) for t in lines[pos].split()])
            pos += 1
        tokens = lines[pos].split()
        if tokens[0] != "bias":
            raise InputError(f"expected bias line for layer {idx}")
        bias = [float(t) for t in tokens[1:]]
        pos += 1
        w = np.array(rows, dtype=float).reshape(widths[idx], widths[idx - 1])
        layers.append((w, np.array(bias, dtype=float)))
    return NetParams(layers, slope)
