"""Runtime certificates: structural inequalities checked on concrete networks.

Each certificate evaluates both sides of an inequality that must hold for any
parameters within its hypotheses, reports per-layer residuals, and returns a
three-way status: ``pass``, ``fail``, or ``premise_failed`` when a hypothesis
(balancedness, kernel-trace bound, Jacobian rank) is not met, so an
inapplicable theorem is never confused with a violated one.

Orientation: for upper-bound certificates slack is ``rhs - lhs``; for the
curvature lower bound it is ``lhs - rhs``. In both cases ``slack >= 0`` (up
to a 1e-8 relative guard) means pass.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import InputError, PreconditionError, ScopeError
from .net import (
    NetParams,
    forward,
    jacobian,
    ntk_bilinear_2nd_derivative,
    ntk_trace,
    balancedness_residual,
)

JAC_RANK_TOL = 1e-6  # relative cutoff for "the Jacobian has rank k"
PASS_GUARD = 1e-8
DEFAULT_BALANCE_TOL = 0.05


@dataclass
class Certificate:
    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    status: str  # "pass" | "fail" | "premise_failed"
    per_layer: list[float] | None
    context: dict

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "status": self.status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "context": self.context,
            "per_layer": [] if self.per_layer is None else list(self.per_layer),
        }


def _finish(name, lhs, rhs, slack, per_layer, context, premise_reason=None) -> Certificate:
    if premise_reason is not None:
        context = dict(context, premise_reason=premise_reason)
        return Certificate(name, lhs, rhs, slack, False, "premise_failed", per_layer, context)
    ok = slack >= -PASS_GUARD * max(1.0, abs(rhs))
    return Certificate(name, lhs, rhs, slack, ok, "pass" if ok else "fail", per_layer, context)


def certificates_to_json(certs, path=None) -> str:
    payload = json.dumps([c.to_json() for c in certs], indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(payload + "\n")
    return payload


@dataclass
class SpectralReport:
    """Singular value spectra of the weights and of scaled pre-activations."""

    weight_spectra: list[np.ndarray]
    weight_ranks: list[int]
    preact_spectra: list[np.ndarray]
    threshold: float

    def preact_s_tail(self, k: int) -> list[float]:
        """Per-layer (k+1)-th singular value of preacts / sqrt(N); 0 if absent."""
        return [float(s[k]) if len(s) > k else 0.0 for s in self.preact_spectra]

    def weight_rank_counts(self, exactly: int) -> int:
        return sum(1 for r in self.weight_ranks if r == exactly)


def layer_spectra(params: NetParams, x, threshold: float = 0.1) -> SpectralReport:
    """SVD of every weight matrix and of every ``preact_l(X)/sqrt(N)``."""
    cache = forward(params, x)
    n = cache.input.shape[1]
    w_spec = [la.singular_values(w) for w, _ in params.layers]
    ranks = [int(np.sum(s > threshold)) for s in w_spec]
    p_spec = [la.singular_values(z / math.sqrt(n)) for z in cache.preacts]
    return SpectralReport(w_spec, ranks, p_spec, threshold)


def spectra_to_csv(report: SpectralReport, path) -> None:
    """Weight spectra with the fixed header ``layer,index,sigma``."""
    with open(path, "w", newline="") as fh:
        fh.write("layer,index,sigma\n")
        for ell, s in enumerate(report.weight_spectra, start=1):
            for idx, val in enumerate(s, start=1):
                fh.write(f"{ell},{idx},{val!r}\n")


def jacobian_rank(params: NetParams, x, tol: float = JAC_RANK_TOL) -> int:
    """Numerical rank of the input-output Jacobian at ``x`` (relative cutoff)."""
    return la.rank_rel(jacobian(params, x), tol=tol)


def auto_k(params: NetParams, threshold: float = 0.1) -> int:
    """Detected rank of the middle weight matrix at an absolute threshold."""
    mid = (params.depth + 1) // 2
    return la.numerical_rank(params.layers[mid - 1][0], threshold)


# ---------------------------------------------------------------------------
# weight bottleneck certificate


def thm3_certificate(
    params: NetParams,
    x,
    k: int,
    p: float = 0.5,
    jac_rank_tol: float = JAC_RANK_TOL,
) -> Certificate:
    """Per-layer deviation from partial isometries vs the norm-excess budget.

    lhs is ``sum_l ||W_l - U_{l,k} V_{l,k}^T||_F^2 + ||b_l||^2``; rhs is
    ``c1 - 2 log kdet(Jf(x), k)`` with ``c1 = ||theta||^2 - k*depth``. Also
    counts layers whose residual exceeds the per-layer budget ``rhs/(p*L)``.
    Requires the measured Jacobian rank at ``x`` to equal ``k``.
    """
    j = jacobian(params, x)
    measured = la.rank_rel(j, tol=jac_rank_tol)
    if measured != k:
        raise PreconditionError(
            f"jacobian rank at x is {measured}, certificate requested k={k}"
        )
    L = params.depth
    if any(k > min(w.shape) for w, _ in params.layers):
        raise InputError(f"k={k} exceeds the smallest layer dimension")
    per_layer = []
    for w, b in params.layers:
        u, v = la.nearest_partial_isometry(w, k)
        per_layer.append(float(np.sum((w - u @ v.T) ** 2) + b @ b))
    lhs = float(sum(per_layer))
    c1 = params.squared_norm() - k * L
    log_det = math.log(la.k_det(j, k))
    rhs = c1 - 2.0 * log_det
    layer_budget = rhs / (p * L)
    violations = int(sum(r > layer_budget for r in per_layer))
    context = {
        "k": k,
        "c1": c1,
        "p": p,
        "jac_rank_tol": jac_rank_tol,
        "log_det_jacobian": 2.0 * log_det,
        "per_layer_budget": layer_budget,
        "layers_over_budget": violations,
        "guaranteed_max_over_budget": p * L,
    }
    return _finish("THM3_WEIGHTS", lhs, rhs, rhs - lhs, per_layer, context)


# ---------------------------------------------------------------------------
# bounded-activation certificate


def _thm4_rhs(c: float, c1: float, k: int, kdet: float, L: int) -> float:
    return c * max(1.0, math.exp(c1 / k)) * L / (k * kdet ** (2.0 / k))


def thm4_certificate(
    params: NetParams,
    x,
    k: int,
    c: float | None = None,
    p: float = 0.5,
    balance_tol: float = DEFAULT_BALANCE_TOL,
    jac_rank_tol: float = JAC_RANK_TOL,
) -> Certificate:
    """Total activation mass vs the tangent-kernel budget.

    Premises: approximate balancedness, Jacobian rank ``k`` at ``x``, and
    ``Tr kernel(x,x) <= c * depth`` using the bias-free layer decomposition.
    With ``c=None`` the constant is set to the measured trace over depth,
    which makes that premise hold by construction (flagged as ``auto_c``; the
    informative signal is then the slack, not the pass bit).
    """
    L = params.depth
    x = np.asarray(x, dtype=float).reshape(-1)
    cache = forward(params, x)
    per_layer = [float(np.sum(cache.act(ell - 1) ** 2)) for ell in range(1, L + 1)]
    lhs = float(sum(per_layer))

    trace_val, _ = ntk_trace(params, x, include_bias=False)
    auto_c = c is None
    if auto_c:
        c = trace_val / L
    j = jacobian(params, x)
    measured = la.rank_rel(j, tol=jac_rank_tol)
    kdet = la.k_det(j, min(k, min(j.shape)))
    c1 = params.squared_norm() - k * L
    rhs = _thm4_rhs(c, c1, k, kdet, L) if kdet > 0 else math.inf
    balance = balancedness_residual(params)

    premise = None
    if measured != k:
        premise = f"jacobian rank {measured} != k={k}"
    elif balance > balance_tol:
        premise = f"balancedness residual {balance:.3e} > tol {balance_tol:.3e}"
    elif trace_val > c * L * (1.0 + 1e-12):
        premise = f"kernel trace {trace_val:.6g} exceeds c*L = {c * L:.6g}"

    layer_budget = rhs / (p * L)
    violations = int(sum(r > layer_budget for r in per_layer))
    context = {
        "k": k,
        "c": c,
        "auto_c": auto_c,
        "c1": c1,
        "p": p,
        "balance_residual": balance,
        "balance_tol": balance_tol,
        "ntk_trace": trace_val,
        "per_layer_budget": layer_budget,
        "layers_over_budget": violations,
        "guaranteed_max_over_budget": p * L,
    }
    return _finish("THM4_ACTIVATIONS", lhs, rhs, rhs - lhs, per_layer, context, premise)


# ---------------------------------------------------------------------------
# bottleneck spectrum certificate


def _cor5_bound(weight_budget: float, mean_term: float, p: float, L: int) -> float:
    return math.sqrt(max(weight_budget, 0.0)) * (math.sqrt(mean_term) + math.sqrt(p)) / (p * math.sqrt(L))


def cor5_certificate(
    params: NetParams,
    x_batch,
    k: int,
    c: float | None = None,
    p: float = 0.5,
    balance_tol: float = DEFAULT_BALANCE_TOL,
    jac_rank_tol: float = JAC_RANK_TOL,
) -> Certificate:
    """(k+1)-th singular value of scaled pre-activations vs the decay bound.

    At least ``(1-p)L`` layers must satisfy
    ``s_{k+1}(preact_l(X)/sqrt(N)) <= bound`` where the bound combines the
    weight-deviation budget and the mean activation budget and decays like
    ``1/sqrt(L)``. lhs/rhs compare the non-compliant layer fraction to ``p``.
    """
    L = params.depth
    cache = forward(params, x_batch)
    xb = cache.input
    n = xb.shape[1]

    jacs = [jacobian(params, xb[:, i]) for i in range(n)]
    ranks = [la.rank_rel(j, tol=jac_rank_tol) for j in jacs]
    bad_rank = sum(1 for r in ranks if r != k)
    balance = balancedness_residual(params)
    traces = [ntk_trace(params, xb[:, i], include_bias=False)[0] for i in range(n)]
    mean_trace = float(np.mean(traces))
    auto_c = c is None
    if auto_c:
        c = mean_trace / L

    premise = None
    if bad_rank:
        premise = f"{bad_rank}/{n} batch points have jacobian rank != {k}"
    elif balance > balance_tol:
        premise = f"balancedness residual {balance:.3e} > tol {balance_tol:.3e}"
    elif mean_trace > c * L * (1.0 + 1e-12):
        premise = f"mean kernel trace {mean_trace:.6g} exceeds c*L = {c * L:.6g}"

    c1 = params.squared_norm() - k * L
    kdets = [la.k_det(j, min(k, min(j.shape))) for j in jacs]
    if min(kdets) > 0.0:
        log_dets = [math.log(kd) for kd in kdets]
        weight_budget = c1 - 2.0 * max(log_dets)
        mean_term = float(
            np.mean([
                c * max(1.0, math.exp(c1 / k)) / (k * math.exp(ld) ** (2.0 / k))
                for ld in log_dets
            ])
        )
        bound = _cor5_bound(weight_budget, mean_term, p, L)
    else:
        weight_budget, mean_term, bound = math.inf, math.inf, math.inf
        if premise is None:
            premise = "a batch point has a rank-deficient Jacobian at k"

    tails = [
        float(s[k]) if len(s) > k else 0.0
        for s in (la.singular_values(z / math.sqrt(n)) for z in cache.preacts)
    ]
    non_compliant = sum(1 for t in tails if t > bound * (1.0 + PASS_GUARD))
    lhs = non_compliant / L
    rhs = p
    context = {
        "k": k,
        "c": c,
        "auto_c": auto_c,
        "c1": c1,
        "p": p,
        "bound": bound,
        "weight_budget": weight_budget,
        "mean_activation_term": mean_term,
        "mean_ntk_trace": mean_trace,
        "balance_residual": balance,
        "balance_tol": balance_tol,
        "n_points": n,
        "compliant_layers": L - non_compliant,
        "required_layers": (1.0 - p) * L,
    }
    return _finish("COR5_SK1", lhs, rhs, rhs - lhs, tails, context, premise)


# ---------------------------------------------------------------------------
# kernel curvature certificate


def prop6_certificate(params: NetParams, x) -> Certificate:
    """Mixed kernel curvature at the top singular pair vs its depth lower bound.

    lhs is the bilinear second derivative along the top right/left singular
    vectors of the Jacobian; rhs is ``L * s1^2 / ||Jf(x) u||^(2/L)``. The
    weaker headline constant ``2 L s1^(2 - 2/L)`` is reported in the context.
    Requires a generic point (no pre-activation exactly at the kink).
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    cache = forward(params, x)
    if any(float(np.abs(z).min()) == 0.0 for z in cache.preacts[:-1]):
        raise PreconditionError("a pre-activation sits exactly on the kink at x")
    j = jacobian(params, x)
    res = la.svd(j)
    s1 = float(res.s[0])
    L = params.depth
    if s1 == 0.0:
        context = {"s1": 0.0, "headline_rhs": 0.0}
        return _finish("PROP6_NTK", 0.0, 0.0, 0.0, None, context)
    u = res.v[:, 0]
    v = res.u[:, 0]
    lhs = ntk_bilinear_2nd_derivative(params, x, u, v)
    ju_norm = float(np.linalg.norm(j @ u))
    rhs = L * s1**2 / ju_norm ** (2.0 / L)
    context = {
        "s1": s1,
        "headline_rhs": 2.0 * L * s1 ** (2.0 - 2.0 / L),
        "slope_a": params.slope_a,
    }
    return _finish("PROP6_NTK", lhs, rhs, lhs - rhs, None, context)


# ---------------------------------------------------------------------------
# log-pseudo-determinant lower bound


def r1_lower_bound(params: NetParams, x_batch, jac_rank_tol: float = JAC_RANK_TOL) -> float:
    """Max of ``2 log pseudo_det(Jf(x_i))`` over points of maximal Jacobian rank."""
    xb = _batchify(params, x_batch)
    best = None
    best_rank = -1
    for i in range(xb.shape[1]):
        j = jacobian(params, xb[:, i])
        r = la.rank_rel(j, tol=jac_rank_tol)
        val = 2.0 * math.log(la.pseudo_det(j, tol=jac_rank_tol))
        if r > best_rank or (r == best_rank and val > best):
            best_rank, best = r, val
    return float(best)


def _batchify(params, x_batch):
    xb = np.asarray(x_batch, dtype=float)
    if xb.ndim == 1:
        xb = xb.reshape(-1, 1)
    if xb.shape[0] != params.d_in:
        raise InputError(f"batch must have {params.d_in} rows")
    return xb


def standard_certificates(
    params: NetParams,
    x_batch,
    k: int | None = None,
    p: float = 0.5,
    c: float | None = None,
    balance_tol: float = DEFAULT_BALANCE_TOL,
    jac_rank_tol: float = JAC_RANK_TOL,
) -> list[Certificate]:
    """Bundle of the four structural certificates on one network and batch.

    With ``k=None`` the modal Jacobian rank over the batch is used, and the
    batch is filtered to the points realizing it (the rank hypotheses then
    hold by construction). The point certificates run at the first point of
    that rank whose pre-activations avoid the kink.
    """
    xb = _batchify(params, x_batch)
    n = xb.shape[1]
    ranks = [jacobian_rank(params, xb[:, i], tol=jac_rank_tol) for i in range(n)]
    if k is None:
        k = int(np.bincount(ranks).argmax())
    keep = [i for i in range(n) if ranks[i] == k]
    if not keep:
        raise PreconditionError(f"no batch point has jacobian rank {k}")
    filtered = xb[:, keep]
    x0 = None
    for i in keep:
        cache = forward(params, xb[:, i])
        if all(float(np.abs(z).min()) > 0.0 for z in cache.preacts[:-1]):
            x0 = xb[:, i]
            break
    if x0 is None:
        raise PreconditionError("every candidate point sits on a kink")
    return [
        thm3_certificate(params, x0, k=k, p=p, jac_rank_tol=jac_rank_tol),
        thm4_certificate(
            params, x0, k=k, c=c, p=p, balance_tol=balance_tol, jac_rank_tol=jac_rank_tol
        ),
        cor5_certificate(
            params, filtered, k=k, c=c, p=p, balance_tol=balance_tol, jac_rank_tol=jac_rank_tol
        ),
        prop6_certificate(params, x0),
    ]


# ---------------------------------------------------------------------------
# uniform-Lipschitz curvature gap


def lip_curvature_gap(
    params: NetParams, x, y, c_lip: float, jac_rank_tol: float = JAC_RANK_TOL
) -> Certificate:
    """Curvature-aware lower estimate vs the measured norm excess.

    lhs is ``log|Jf(x)|+ + log|Jf(y)|+ + ||Jf(x) - Jf(y)||_* / c_lip^2``; the
    nuclear term is strictly positive across a crease, so a function with
    zero norm excess in the deep limit cannot have uniformly Lipschitz
    representations. rhs is the norm excess ``||theta||^2 - k * depth``
    measured at ``k = max(rank Jf(x), rank Jf(y))``. ReLU networks only.
    """
    if params.slope_a != 0.0:
        raise ScopeError("curvature gap is stated for ReLU networks (slope 0)")
    if c_lip <= 0:
        raise InputError("c_lip must be > 0")
    jx = jacobian(params, np.asarray(x, dtype=float).reshape(-1))
    jy = jacobian(params, np.asarray(y, dtype=float).reshape(-1))
    nuclear = float(np.sum(la.singular_values(jx - jy)))
    lhs = (
        math.log(la.pseudo_det(jx, tol=jac_rank_tol))
        + math.log(la.pseudo_det(jy, tol=jac_rank_tol))
        + nuclear / c_lip**2
    )
    k = max(la.rank_rel(jx, tol=jac_rank_tol), la.rank_rel(jy, tol=jac_rank_tol))
    rhs = params.squared_norm() - k * params.depth
    context = {
        "k": k,
        "c_lip": c_lip,
        "nuclear_term": nuclear,
        "log_pdet_x": math.log(la.pseudo_det(jx, tol=jac_rank_tol)),
        "log_pdet_y": math.log(la.pseudo_det(jy, tol=jac_rank_tol)),
    }
    return _finish("LIP_CURVATURE", lhs, rhs, rhs - lhs, None, context)
