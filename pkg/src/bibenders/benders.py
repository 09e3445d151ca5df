"""Benders decomposition building blocks for the master/subproblem block split.

The decomposed problem is

    min  c1'x + f1'y       min  c2'x + f2'y
    s.t. A x + B y >= b    (subproblem rows)
         D y       >= d    (master rows)
         x, y      >= 0

Fixing ``y`` leaves the subproblem ``min c'x, A x >= b - B y, x >= 0``.
Its dual vertices generate optimality cuts and its dual rays feasibility
cuts.  In the bi-objective setting optimality cuts carry a weight ``lam``
and bound ``lam*theta1 + (1-lam)*theta2``; the master models theta1/theta2
as split nonnegative pairs because subproblem values may be negative.
"""

from __future__ import annotations

import numpy as np

from .biobj import BiObjectiveLP
from .exceptions import (
    CycleLimitExceeded,
    DimensionMismatch,
    IterationLimitError,
    LambdaOutOfRangeError,
    MasterInfeasibleError,
    NotACertificateError,
    UnboundedError,
)
from .lp import GE, INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, solve_dual_with_ray, solve_simplex

FEASIBILITY = "feasibility"
OPTIMALITY = "optimality"

CUT_DEDUP_TOL = 1e-9
DEFAULT_BOX = 1e7
N_THETA = 4  # theta1+, theta1-, theta2+, theta2- master columns


class DecomposedBLP:
    """Bi-objective LP with an explicit master (y) / subproblem (x) split."""

    def __init__(self, A, B, D, b, d, c1, c2, f1, f2):
        self.b = np.asarray(b, dtype=float).reshape(-1)
        self.d = np.asarray(d, dtype=float).reshape(-1)
        self.c1 = np.asarray(c1, dtype=float).reshape(-1)
        self.c2 = np.asarray(c2, dtype=float).reshape(-1)
        self.f1 = np.asarray(f1, dtype=float).reshape(-1)
        self.f2 = np.asarray(f2, dtype=float).reshape(-1)
        n, q = self.c1.size, self.f1.size
        self.A = np.asarray(A, dtype=float).reshape(self.b.size, n)
        self.B = np.asarray(B, dtype=float).reshape(self.b.size, q)
        self.D = np.asarray(D, dtype=float).reshape(self.d.size, q)
        if self.A.shape[0] != self.B.shape[0] or self.A.shape[0] != self.b.size:
            raise DimensionMismatch("subproblem row blocks disagree")
        if self.D.shape[0] != self.d.size:
            raise DimensionMismatch("master row blocks disagree")
        if self.c2.size != n or self.f2.size != q:
            raise DimensionMismatch("cost vector lengths disagree")
        for arr in (self.A, self.B, self.D, self.b, self.d, self.c1, self.c2, self.f1, self.f2):
            if not np.isfinite(arr).all():
                raise DimensionMismatch("NaN/Inf in problem data")

    @property
    def n_sub(self):
        return self.c1.size

    @property
    def n_master(self):
        return self.f1.size

    @property
    def m_sub(self):
        return self.b.size

    @property
    def m_master(self):
        return self.d.size

    def sub_rhs(self, ybar):
        return self.b - self.B @ np.asarray(ybar, dtype=float)

    def sub_lp(self, lam, ybar):
        """Weighted subproblem ``min (lam c1 + (1-lam) c2)'x, Ax >= b - B ybar``."""
        c = lam * self.c1 + (1.0 - lam) * self.c2
        return LinearProgram(c, self.A, [GE] * self.m_sub, self.sub_rhs(ybar))

    def sub_blp(self, ybar):
        return BiObjectiveLP(self.c1, self.c2, self.A, [GE] * self.m_sub, self.sub_rhs(ybar))

    def full_blp(self):
        """Undecomposed problem over stacked variables ``[x; y]``."""
        n, q = self.n_sub, self.n_master
        top = np.hstack([self.A, self.B])
        bottom = np.hstack([np.zeros((self.m_master, n)), self.D])
        Afull = np.vstack([top, bottom]) if top.size or bottom.size else np.zeros((0, n + q))
        return BiObjectiveLP(
            np.concatenate([self.c1, self.f1]),
            np.concatenate([self.c2, self.f2]),
            Afull,
            [GE] * (self.m_sub + self.m_master),
            np.concatenate([self.b, self.d]),
        )


class Cut:
    """Feasibility cut ``(b - By)'pi <= 0`` or weighted optimality cut
    ``(b - By)'pi <= lam*theta1 + (1-lam)*theta2``."""

    def __init__(self, kind, pi, lam=None):
        self.kind = kind
        self.pi = np.asarray(pi, dtype=float).reshape(-1)
        self.lam = None if lam is None else float(lam)
        if not np.isfinite(self.pi).all():
            raise DimensionMismatch("cut multiplier contains NaN/Inf")

    def master_row(self, prob):
        """Row over master columns ``[t1+, t1-, t2+, t2-, y...]`` in GE form."""
        piB = self.pi @ prob.B
        rhs = float(self.pi @ prob.b)
        if self.kind == FEASIBILITY:
            theta = np.zeros(N_THETA)
        else:
            lam = self.lam
            theta = np.array([lam, -lam, 1.0 - lam, -(1.0 - lam)])
        return np.concatenate([theta, piB]), GE, rhs

    def value(self, prob, theta1, theta2, y):
        """Cut slack, negative when violated: rhs-side minus lhs of the <= form."""
        lhs = float(self.pi @ prob.sub_rhs(y))
        if self.kind == FEASIBILITY:
            return -lhs
        return self.lam * theta1 + (1.0 - self.lam) * theta2 - lhs

    def __repr__(self):
        lam = "" if self.lam is None else f", lam={self.lam:.6g}"
        return f"Cut({self.kind}{lam})"


class CutPool:
    """Deduplicating cut store shared across master solves."""

    def __init__(self):
        self.cuts = []
        self.n_feasibility = 0
        self.n_optimality = 0

    def __len__(self):
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    @property
    def has_optimality(self):
        return self.n_optimality > 0

    def add(self, cut):
        """Insert unless an equivalent cut is present; returns True if added."""
        for old in self.cuts:
            if old.kind != cut.kind:
                continue
            if cut.kind == OPTIMALITY and abs(old.lam - cut.lam) > CUT_DEDUP_TOL:
                continue
            if old.pi.size == cut.pi.size and np.max(
                    np.abs(old.pi - cut.pi), initial=0.0) <= CUT_DEDUP_TOL:
                return False
        self.cuts.append(cut)
        if cut.kind == FEASIBILITY:
            self.n_feasibility += 1
        else:
            self.n_optimality += 1
        return True


def make_feasibility_cut(prob, ray, ybar=None):
    """Feasibility cut from a dual extreme ray, with a Farkas check.

    The ray is normalized to unit max-norm.  When ``ybar`` is given the cut
    is additionally required to cut that master point off.
    """
    ray = np.asarray(ray, dtype=float).reshape(-1)
    if ray.size != prob.m_sub:
        raise DimensionMismatch("ray length does not match subproblem row count")
    scale = float(np.abs(ray).max(initial=0.0))
    if scale <= 1e-12:
        raise NotACertificateError("zero ray is not a certificate")
    ray = ray / scale
    if (ray < -1e-8).any():
        raise NotACertificateError("dual ray has negative components")
    col = ray @ prob.A if prob.n_sub else np.zeros(0)
    if col.size and col.max(initial=0.0) > 1e-8 * max(1.0, np.abs(prob.A).max()):
        raise NotACertificateError("ray'A has positive components")
    cut = Cut(FEASIBILITY, ray)
    if ybar is not None and cut.value(prob, 0.0, 0.0, ybar) > -1e-10:
        raise NotACertificateError("ray does not cut off the offending master point")
    return cut


def make_optimality_cut(prob, pi, lam):
    """Weighted optimality cut from a dual point of the lam-weighted subproblem."""
    if not -1e-12 <= lam <= 1.0 + 1e-12:
        raise LambdaOutOfRangeError(f"lambda {lam} outside [0, 1]")
    pi = np.asarray(pi, dtype=float).reshape(-1)
    if pi.size != prob.m_sub:
        raise DimensionMismatch("pi length does not match subproblem row count")
    return Cut(OPTIMALITY, pi, lam=min(max(lam, 0.0), 1.0))


# ---- master assembly -------------------------------------------------------


def master_matrix(prob, pool, include_theta=True, extra_rows=(), box=None):
    """Rows over master columns: D block, cut rows, extra rows, optional box."""
    q = prob.n_master
    ncols = (N_THETA if include_theta else 0) + q
    rows = []
    senses = []
    rhs = []

    def push(theta_part, y_part, rv):
        if include_theta:
            rows.append(np.concatenate([theta_part, y_part]))
        else:
            rows.append(np.asarray(y_part, dtype=float))
        senses.append(GE)
        rhs.append(rv)

    for i in range(prob.m_master):
        push(np.zeros(N_THETA), prob.D[i], prob.d[i])
    for cut in pool:
        coeffs, _s, rv = cut.master_row(prob)
        push(coeffs[:N_THETA], coeffs[N_THETA:], rv)
    for coeffs, rv in extra_rows:
        coeffs = np.asarray(coeffs, dtype=float)
        push(coeffs[:N_THETA], coeffs[N_THETA:], rv)
    if box is not None:
        for j in range(ncols):
            e = np.zeros(ncols)
            e[j] = -1.0
            rows.append(e)
            senses.append(GE)
            rhs.append(-box)
    A = np.vstack(rows) if rows else np.zeros((0, ncols))
    return A, senses, np.array(rhs, dtype=float), ncols


def master_costs(prob, include_theta=True):
    """Per-objective master cost vectors over ``[t1+, t1-, t2+, t2-, y...]``."""
    if include_theta:
        c1 = np.concatenate([[1.0, -1.0, 0.0, 0.0], prob.f1])
        c2 = np.concatenate([[0.0, 0.0, 1.0, -1.0], prob.f2])
    else:
        c1, c2 = prob.f1.copy(), prob.f2.copy()
    return c1, c2


def master_lp(prob, lam, pool, include_theta=True, extra_rows=(), box=None):
    c1, c2 = master_costs(prob, include_theta)
    A, senses, rhs, _ = master_matrix(prob, pool, include_theta, extra_rows, box)
    return LinearProgram(lam * c1 + (1.0 - lam) * c2, A, senses, rhs)


def master_blp(prob, pool, extra_rows=(), box=None):
    c1, c2 = master_costs(prob, include_theta=True)
    A, senses, rhs, _ = master_matrix(prob, pool, True, extra_rows, box)
    return BiObjectiveLP(c1, c2, A, senses, rhs)


def split_master_x(prob, x, include_theta=True):
    """(theta1, theta2, y) from a master column-value vector."""
    if include_theta:
        t1 = float(x[0] - x[1])
        t2 = float(x[2] - x[3])
        y = np.asarray(x[N_THETA:N_THETA + prob.n_master])
    else:
        t1 = t2 = 0.0
        y = np.asarray(x[: prob.n_master])
    return t1, t2, y


class BendersResult:
    """Converged weighted Benders solve: incumbent point and bookkeeping."""

    def __init__(self, y, x, theta, objective, iterations, pool,
                 emitted_feasibility, emitted_optimality):
        self.y = y
        self.x = x
        self.theta = theta
        self.objective = objective
        self.iterations = iterations
        self.pool = pool
        self.emitted_feasibility = emitted_feasibility
        self.emitted_optimality = emitted_optimality


def solve_single_benders(prob, lam, tol=1e-7, pool=None, iter_limit=1000, box=DEFAULT_BOX):
    """Benders decomposition for the lam-weighted problem.

    Cuts accumulate in ``pool`` (created on demand) and are reusable by later
    solves.  Convergence is a relative upper/lower bound gap of ``tol``.
    Returns a :class:`BendersResult` whose ``y``/``x`` form the incumbent,
    i.e. the candidate that achieved the best verified upper bound.
    """
    if not -1e-12 <= lam <= 1.0 + 1e-12:
        raise LambdaOutOfRangeError(f"lambda {lam} outside [0, 1]")
    lam = min(max(lam, 0.0), 1.0)
    if pool is None:
        pool = CutPool()
    fw = lam * prob.f1 + (1.0 - lam) * prob.f2
    no_sub = prob.n_sub == 0 and prob.m_sub == 0
    ub = np.inf
    incumbent = None
    boxed = False
    stall = 0
    emitted_fc = emitted_oc = 0
    for it in range(1, iter_limit + 1):
        include_theta = pool.has_optimality
        out = solve_simplex(master_lp(prob, lam, pool, include_theta,
                                      box=box if boxed else None))
        if out.status == INFEASIBLE:
            raise MasterInfeasibleError("master problem infeasible")
        if out.status == UNBOUNDED:
            if boxed:
                raise UnboundedError("master unbounded even inside the box")
            boxed = True
            continue
        t1m, t2m, y = split_master_x(prob, out.x, include_theta)
        lb = out.objective
        if no_sub:
            _check_box(out, boxed, N_THETA * include_theta + prob.n_master)
            return BendersResult(y, np.zeros(0), 0.0, lb, it, pool, 0, 0)
        sub = solve_dual_with_ray(prob.sub_lp(lam, y))
        if sub.status == UNBOUNDED:
            emitted_fc += 1
            added = pool.add(make_feasibility_cut(prob, sub.ray))
        else:
            t = sub.objective
            cand = float(fw @ y) + t
            if cand < ub - 1e-15:
                ub = cand
                incumbent = (y, sub.duals, t)
            emitted_oc += 1
            added = pool.add(make_optimality_cut(prob, sub.x, lam))
            if include_theta and ub - lb <= tol * (1.0 + abs(ub)):
                _check_box(out, boxed, N_THETA + prob.n_master)
                y_i, x_i, t_i = incumbent
                return BendersResult(y_i, x_i, t_i, ub, it, pool,
                                     emitted_fc, emitted_oc)
        if added:
            stall = 0
        else:
            stall += 1
            if stall > 5:
                raise CycleLimitExceeded("Benders re-separated known cuts without progress")
    raise IterationLimitError("Benders iteration limit reached")


def _check_box(out, boxed, n_cols):
    """Raise if a bounding-box row carries a nonzero dual at convergence.

    A box row with zero multiplier is incidental (removing it leaves the
    optimum unchanged); a nonzero multiplier certifies the boxed problem
    differs from the unbounded original.
    """
    if not boxed:
        return
    box_duals = np.asarray(out.duals)[-n_cols:]
    if np.max(np.abs(box_duals), initial=0.0) > 1e-7:
        raise UnboundedError("artificial box is active at convergence")


