"""Independent frontier ground truth: dichotomic weighted-sum enumeration.

Works directly on the undecomposed problem with the plain simplex — no
Benders machinery, no parametric pivoting — so it cross-validates both the
parametric walker and the decomposition solvers.
"""

from __future__ import annotations

import numpy as np

from .bbsa import _lambda_intervals, filter_extreme
from .biobj import EXPLORED_TOL, Frontier, FrontierSegment
from .exceptions import InfeasibleError, RecursionLimitError, UnboundedError
from .lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    SimplexEngine,
    solve_simplex,
    to_standard_form,
)

DEFAULT_RECURSION_LIMIT = 80


def _solve(lp):
    out = solve_simplex(lp)
    if out.status == INFEASIBLE:
        raise InfeasibleError(certificate=out.ray)
    if out.status == UNBOUNDED:
        raise UnboundedError(ray=out.ray)
    return out


def _lex_endpoint(blp, primary):
    """Lexicographic vertex via two staged single-objective solves.

    The second stage pivots only on columns whose primary reduced cost is
    zero, staying exactly on the primary-optimal face (no epsilon cap row,
    which would shift the vertex by the cap slack times the edge slope).
    """
    cp = blp.cost1 if primary == 1 else blp.cost2
    cs = blp.cost2 if primary == 1 else blp.cost1
    std, cmap = to_standard_form(LinearProgram(cp, blp.A, blp.senses, blp.rhs))
    extra = std.n_vars - blp.n_vars
    cp_std = np.concatenate([cp, np.zeros(extra)])
    cs_std = np.concatenate([cs, np.zeros(extra)])
    eng = SimplexEngine(std.A, std.rhs)
    if not eng.phase1():
        raise InfeasibleError(certificate=eng.farkas_certificate())
    if eng.minimize(cp_std) != OPTIMAL:
        raise UnboundedError(ray=cmap.original(eng.last_ray))
    if eng.minimize(cs_std, stay_optimal_for=cp_std) != OPTIMAL:
        raise UnboundedError(ray=cmap.original(eng.last_ray))
    x = cmap.original(eng.x())
    return float(blp.cost1 @ x), float(blp.cost2 @ x), x


def dichotomic_frontier(blp, tol=1e-7, rec_limit=DEFAULT_RECURSION_LIMIT):
    """Extreme non-dominated frontier by recursive weighted-sum solves.

    Endpoints are the two lexicographic optima; each adjacent pair is probed
    at its chord weight and split while the weighted solve improves on the
    chord by more than ``tol`` (relative).  Weight intervals are
    reconstructed from the chords of the final point list.
    """
    z1l, z2l, xl = _lex_endpoint(blp, 1)
    z1r, z2r, xr = _lex_endpoint(blp, 2)
    entries = [(z1l, z2l, xl), (z1r, z2r, xr)]

    def recurse(za, zb, depth):
        if depth > rec_limit:
            raise RecursionLimitError("dichotomic recursion too deep")
        num = za[1] - zb[1]
        den = num + (zb[0] - za[0])
        if den <= 1e-12 or num <= 1e-12:
            return
        lam = min(max(num / den, 1e-12), 1.0 - 1e-12)
        out = _solve(blp.weighted(lam))
        z1 = float(blp.cost1 @ out.x)
        z2 = float(blp.cost2 @ out.x)
        chord = lam * za[0] + (1.0 - lam) * za[1]
        if lam * z1 + (1.0 - lam) * z2 < chord - tol * (1.0 + abs(chord)):
            entries.append((z1, z2, out.x))
            recurse(za, (z1, z2), depth + 1)
            recurse((z1, z2), zb, depth + 1)

    if abs(z1l - z1r) > EXPLORED_TOL or abs(z2l - z2r) > EXPLORED_TOL:
        recurse((z1l, z2l), (z1r, z2r), 0)
    finals = filter_extreme(entries)
    intervals = _lambda_intervals(finals)
    segments = [FrontierSegment(z1, z2, x, hi, lo)
                for (z1, z2, x), (hi, lo) in zip(finals, intervals)]
    return Frontier(segments)


class FrontierComparison:
    """Pointwise match report between two frontiers."""

    def __init__(self, matched, extra_a, extra_b, tol):
        self.matched = matched
        self.extra_a = extra_a
        self.extra_b = extra_b
        self.tol = tol

    @property
    def equal(self):
        return not self.extra_a and not self.extra_b

    def __repr__(self):
        return (f"FrontierComparison(matched={len(self.matched)}, "
                f"extra_a={len(self.extra_a)}, extra_b={len(self.extra_b)})")

    def describe(self):
        lines = [f"matched pairs: {len(self.matched)}"]
        for z in self.extra_a:
            lines.append(f"only in A: ({z[0]:.9g}, {z[1]:.9g})")
        for z in self.extra_b:
            lines.append(f"only in B: ({z[0]:.9g}, {z[1]:.9g})")
        lines.append("equal" if self.equal else "NOT equal")
        return "\n".join(lines)


def _points_of(frontier):
    if hasattr(frontier, "points"):
        pts = frontier.points()
    else:
        pts = np.asarray(list(frontier), dtype=float).reshape(-1, 2)
    return [np.asarray(p, dtype=float).reshape(2) for p in pts]


def compare_frontiers(a, b, tol=1e-6):
    """Match the points of two frontiers within ``tol`` (max-norm).

    Accepts :class:`Frontier` objects or plain point iterables.  The report
    lists matched pairs and the unmatched extras of each side; ``equal`` is
    True iff both extras are empty.
    """
    pa = _points_of(a)
    pb = _points_of(b)
    used = [False] * len(pb)
    matched = []
    extra_a = []
    for z in pa:
        hit = None
        for i, w in enumerate(pb):
            if not used[i] and np.max(np.abs(z - w)) <= tol:
                hit = i
                break
        if hit is None:
            extra_a.append(z)
        else:
            used[hit] = True
            matched.append((z, pb[hit]))
    extra_b = [w for i, w in enumerate(pb) if not used[i]]
    return FrontierComparison(matched, extra_a, extra_b, tol)
