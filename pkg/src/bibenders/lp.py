"""Dense single-objective LP representation and a two-phase revised simplex solver.

Conventions used throughout the package:

* an LP is ``min cost'x  s.t.  rows, x >= 0`` where every row is
  ``(coeffs, sense, rhs)`` with sense one of ``GE``/``LE``/``EQ``;
* dual values are reported per *original* row with the usual min-LP signs:
  ``pi_i >= 0`` for GE rows, ``pi_i <= 0`` for LE rows, free for EQ rows,
  and ``cost'x* == pi'rhs`` at optimality;
* an infeasible LP yields a Farkas certificate ``pi`` with ``pi'A <= 0``
  columnwise and ``pi'rhs > 0``;
* an unbounded LP yields a feasible ray ``r >= 0`` with ``cost'r < 0``.

The solver uses Dantzig pricing with a Bland's-rule fallback after a run of
degenerate pivots, dense explicit basis inverses with rank-1 updates, and a
phase-1 artificial-variable start.
"""

from __future__ import annotations

import numpy as np

from .exceptions import CycleLimitExceeded, DimensionMismatch

GE = "GE"
LE = "LE"
EQ = "EQ"

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-9
ART_EXIT_TOL = 1e-7  # minimum pivot magnitude for forcing an artificial out
WEAK_PIVOT_TOL = 1e-6  # below this, re-factorize and re-derive the column first
OPT_TOL = 1e-9
DEGEN_STEP_TOL = 1e-11
SHUFFLE_TRIGGER = 25  # consecutive degenerate pivots before randomized pricing
BLAND_TRIGGER_PER_ROW = 50
REFACTOR_PERIOD = 200
RHS_PERTURB = 1e-9
_RNG_SEED = 0x5EED


class LinearProgram:
    """``min cost'x`` over rows ``coeffs'x {>=,<=,=} rhs`` with ``x >= 0``."""

    def __init__(self, cost, A, senses, rhs):
        self.cost = np.ascontiguousarray(cost, dtype=float)
        self.A = np.ascontiguousarray(A, dtype=float)
        if self.A.ndim != 2:
            self.A = self.A.reshape(-1, self.cost.size)
        self.senses = list(senses)
        self.rhs = np.ascontiguousarray(rhs, dtype=float)
        m, n = self.A.shape
        if self.cost.size != n:
            raise DimensionMismatch(f"cost has {self.cost.size} entries, A has {n} columns")
        if len(self.senses) != m or self.rhs.size != m:
            raise DimensionMismatch("senses/rhs length does not match row count")
        for s in self.senses:
            if s not in (GE, LE, EQ):
                raise DimensionMismatch(f"unknown row sense {s!r}")
        if not (np.isfinite(self.cost).all() and np.isfinite(self.A).all()
                and np.isfinite(self.rhs).all()):
            raise DimensionMismatch("NaN/Inf in problem data")

    @classmethod
    def from_rows(cls, cost, rows):
        """Build from ``rows = [(coeffs, sense, rhs), ...]``."""
        cost = np.asarray(cost, dtype=float)
        if rows:
            A = np.vstack([np.asarray(r[0], dtype=float) for r in rows])
        else:
            A = np.zeros((0, cost.size))
        senses = [r[1] for r in rows]
        rhs = np.array([float(r[2]) for r in rows])
        return cls(cost, A, senses, rhs)

    @property
    def n_vars(self):
        return self.A.shape[1]

    @property
    def n_rows(self):
        return self.A.shape[0]

    def is_standard_form(self):
        return all(s == EQ for s in self.senses)


class ColumnMap:
    """Maps standard-form columns back to the original variables.

    Original variables keep their positions, so recovery is a prefix slice.
    """

    def __init__(self, n_original, n_standard):
        self.n_original = n_original
        self.n_standard = n_standard
        self.indices = np.arange(n_original)

    def original(self, x_std):
        return np.asarray(x_std)[: self.n_original]


def to_standard_form(lp):
    """Convert every row to EQ by appending slack (LE) / surplus (GE) columns.

    Returns ``(lp_std, column_map)``; the objective value is unchanged and
    already-standard problems come back with an identity map.
    """
    n = lp.n_vars
    m = lp.n_rows
    extra = [i for i, s in enumerate(lp.senses) if s != EQ]
    if not extra:
        return lp, ColumnMap(n, n)
    A = np.zeros((m, n + len(extra)))
    A[:, :n] = lp.A
    for k, i in enumerate(extra):
        A[i, n + k] = -1.0 if lp.senses[i] == GE else 1.0
    cost = np.concatenate([lp.cost, np.zeros(len(extra))])
    std = LinearProgram(cost, A, [EQ] * m, lp.rhs.copy())
    return std, ColumnMap(n, n + len(extra))


class Basis:
    """Ordered basic column indices plus the complementary nonbasic set."""

    def __init__(self, basic, n_cols):
        self.basic = np.asarray(basic, dtype=int).copy()
        self.n_cols = int(n_cols)

    @property
    def nonbasic(self):
        return sorted(set(range(self.n_cols)) - set(self.basic.tolist()))

    def __repr__(self):
        return f"Basis(basic={self.basic.tolist()})"


class SimplexOutcome:
    """Result of a simplex solve; fields are None when not applicable."""

    def __init__(self, status, x=None, objective=None, duals=None, ray=None,
                 basis=None, degenerate_pivots=0, pivots=0):
        self.status = status
        self.x = x
        self.objective = objective
        self.duals = duals
        self.ray = ray
        self.basis = basis
        self.degenerate_pivots = degenerate_pivots
        self.pivots = pivots

    def __repr__(self):
        return f"SimplexOutcome({self.status}, obj={self.objective})"


class SimplexEngine:
    """Revised simplex working state for ``min c'x, Ax = b, x >= 0``.

    The engine appends one artificial column per row; artificials never
    re-enter once phase 1 finishes.  Rows are internally sign-flipped so the
    working rhs is nonnegative, with duals mapped back to the caller's row
    orientation.  The engine is also driven directly by the parametric
    bi-objective walker, which needs basis access and single pivots.
    """

    def __init__(self, A, b, perturb=True):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        self.m, self.n = A.shape
        self.row_sign = np.where(b < 0.0, -1.0, 1.0)
        self.W = np.hstack([A * self.row_sign[:, None],
                            np.eye(self.m)]) if self.m else np.zeros((0, A.shape[1]))
        self.b_exact = b * self.row_sign
        self._rng = np.random.default_rng(_RNG_SEED)  # degeneracy tie shuffling
        if perturb and self.m:
            # static rhs perturbation: simple vertices, so degenerate vertex
            # clusters do not stall the pivoting; reporting uses b_exact
            eps = RHS_PERTURB * (1.0 + np.abs(self.b_exact)) * self._rng.uniform(0.5, 1.5, self.m)
            self.b = self.b_exact + eps
        else:
            self.b = self.b_exact.copy()
        self.n_total = self.n + self.m
        self.art0 = self.n  # first artificial column
        self.basic = np.arange(self.n, self.n_total)
        self._crash_slacks()
        self.in_basis = np.zeros(self.n_total, dtype=bool)
        self.in_basis[self.basic] = True
        self.Binv = np.eye(self.m)
        diag = self.W[np.arange(self.m), self.basic]
        if self.m:
            self.Binv[np.arange(self.m), np.arange(self.m)] = 1.0 / diag
        self.xB = self.Binv @ self.b
        self.degenerate_pivots = 0
        self.pivots = 0
        self._consec_degen = 0
        self._since_refactor = 0
        self._phase1_duals = None
        self._art_left = np.zeros(self.n_total, dtype=bool)  # artificials never re-enter

    def _crash_slacks(self):
        """Start from singleton columns with positive row entries where
        possible; only the remaining rows need artificials in phase 1."""
        if not self.m or not self.n:
            return
        body = self.W[:, : self.n]
        nnz = np.count_nonzero(body, axis=0)
        singles = np.flatnonzero(nnz == 1)
        if not singles.size:
            return
        rows = np.abs(body[:, singles]).argmax(axis=0)
        vals = body[rows, singles]
        taken = np.zeros(self.m, dtype=bool)
        for j, r, v in zip(singles, rows, vals):
            if v > PIVOT_TOL and not taken[r]:
                self.basic[r] = j
                taken[r] = True

    # ---- basis algebra -------------------------------------------------

    def refactorize(self):
        B = self.W[:, self.basic]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise DimensionMismatch("singular basis matrix")
        self.xB = self.Binv @ self.b
        self._since_refactor = 0

    def set_basis(self, basic):
        """Install a caller-supplied basis; returns True if primal feasible."""
        basic = np.asarray(basic, dtype=int)
        if basic.size != self.m:
            raise DimensionMismatch("basis size must equal row count")
        self.basic = basic.copy()
        self.in_basis[:] = False
        self.in_basis[self.basic] = True
        self.refactorize()
        return bool((self.xB >= -FEAS_TOL).all())

    def x(self):
        """Current basic solution over the standard-form columns.

        Computed against the exact rhs, so the perturbation never leaks into
        reported solutions; stray negativity is at inverse-accuracy level and
        clipped.
        """
        xe = self.Binv @ self.b_exact
        x = np.zeros(self.n)
        real = self.basic < self.n
        x[self.basic[real]] = np.maximum(xe[real], 0.0)
        return x

    def exact_basic_values(self):
        return self.Binv @ self.b_exact

    def _c_ext(self, c, artificial_cost=0.0):
        ce = np.full(self.n_total, artificial_cost)
        ce[: self.n] = c
        return ce

    def duals(self, c):
        """Simplex multipliers for cost ``c``, in the caller's row orientation."""
        ce = self._c_ext(c)
        pi = self.Binv.T @ ce[self.basic]
        return pi * self.row_sign

    def reduced_costs(self, c, artificial_cost=None):
        if artificial_cost is None:
            ce = self._c_ext(c)
        else:
            ce = self._c_ext(c, artificial_cost)
        pi = self.Binv.T @ ce[self.basic]
        return ce - self.W.T @ pi

    def objective(self, c):
        return float(self._c_ext(c)[self.basic] @ (self.Binv @ self.b_exact))

    # ---- pivoting ------------------------------------------------------

    def ratio_test(self, j):
        """Leaving row for entering column ``j``: (row, step, d) or None if unbounded.

        Harris-style two passes: the first computes the step bound with a
        feasibility-tolerance slack, the second picks the eligible row with
        the largest pivot magnitude, which keeps the basis well conditioned
        through degenerate stretches.  Bland mode picks the smallest basic
        index instead, preserving its termination guarantee.  Zero-level
        basic artificials whose value would grow leave immediately, which
        keeps them pinned at zero after phase 1.
        """
        d = self.Binv @ self.W[:, j]
        pos = d > PIVOT_TOL
        art_neg = (d < -ART_EXIT_TOL) & (self.basic >= self.art0) & (self.xB <= FEAS_TOL)
        if not pos.any() and not art_neg.any():
            return None
        steps = np.full(self.m, np.inf)
        xp = np.maximum(self.xB, 0.0)
        steps[pos] = xp[pos] / d[pos]
        steps[art_neg] = 0.0
        if self._bland_mode:
            tmin = float(steps.min())
            ties = np.flatnonzero(steps <= tmin + 1e-12)
            row = int(ties[np.argmin(self.basic[ties])])
            return row, max(float(steps[row]), 0.0), d
        relaxed = np.full(self.m, np.inf)
        relaxed[pos] = (xp[pos] + FEAS_TOL) / d[pos]
        relaxed[art_neg] = 0.0
        bound = float(relaxed.min())
        eligible = np.flatnonzero(steps <= max(bound, 0.0))
        if self._consec_degen >= SHUFFLE_TRIGGER and eligible.size > 1:
            row = int(self._rng.choice(eligible))  # break degenerate tie cycles
        else:
            row = int(eligible[np.argmax(np.abs(d[eligible]))])
        return row, max(float(steps[row]), 0.0), d

    def pivot(self, j, row, d, step=None):
        """Exchange entering column ``j`` with the basic variable in ``row``."""
        if step is None:
            step = max(self.xB[row], 0.0) / d[row] if d[row] > PIVOT_TOL else 0.0
        leaving = self.basic[row]
        self.xB -= step * d
        self.xB[row] = step
        self.in_basis[leaving] = False
        self.in_basis[j] = True
        self.basic[row] = j
        if leaving >= self.art0:
            self._art_left[leaving] = True
        # rank-1 update of the explicit inverse
        piv_row = self.Binv[row] / d[row]
        corr = np.outer(d, piv_row)
        corr[row] = self.Binv[row] - piv_row
        self.Binv -= corr
        self.pivots += 1
        self._since_refactor += 1
        if step <= DEGEN_STEP_TOL + RHS_PERTURB * 100.0:
            # perturbation turns structurally degenerate steps into epsilon
            # moves; count those as degenerate for the statistics
            self.degenerate_pivots += 1
            self._consec_degen += 1
        else:
            self._consec_degen = 0
        if self._since_refactor >= REFACTOR_PERIOD:
            self.refactorize()
        return step

    def enter(self, j):
        """Ratio test and pivot for entering column ``j``; None if unbounded.

        A weak pivot element usually means the column direction is stale
        update noise, so the basis inverse is refreshed and the test rerun
        before accepting; a genuinely weak pivot triggers an immediate
        refactorization afterwards to stop error compounding.
        """
        rt = self.ratio_test(j)
        if rt is not None and abs(rt[2][rt[0]]) < WEAK_PIVOT_TOL and self._since_refactor:
            self.refactorize()
            rt = self.ratio_test(j)
        if rt is None:
            return None
        row, step, d = rt
        weak = abs(d[row]) < WEAK_PIVOT_TOL
        self.pivot(j, row, d, step)
        if weak:
            self.refactorize()
        return row, step

    _bland_mode = False

    def minimize(self, c, allow_artificials=False, artificial_cost=None,
                 stay_optimal_for=None, max_pivots=None):
        """Run simplex to optimality for cost ``c`` from the current basis.

        Returns ``OPTIMAL`` or ``UNBOUNDED`` (with ``self.last_ray`` set).
        ``stay_optimal_for`` restricts entering candidates to columns with
        zero reduced cost under that vector, so the walk stays on its optimal
        face (the lexicographic second stage).
        """
        if artificial_cost is None:
            ce = self._c_ext(c)
        else:
            ce = self._c_ext(c, artificial_cost)
        ce_face = self._c_ext(stay_optimal_for) if stay_optimal_for is not None else None
        if max_pivots is None:
            max_pivots = 20000 + 500 * max(self.m, 1)
        return self._pivot_loop(ce, allow_artificials, ce_face, max_pivots)

    def _pivot_loop(self, ce, allow_artificials, ce_face, max_pivots):
        bland_after = BLAND_TRIGGER_PER_ROW * max(self.m, 1)
        self._bland_mode = False
        self.last_ray = None
        banned = np.zeros(self.n_total, dtype=bool)
        count = 0
        while True:
            if count >= max_pivots:
                raise CycleLimitExceeded("pivot budget exhausted")
            pi = self.Binv.T @ ce[self.basic]
            cbar = ce - self.W.T @ pi
            cand = cbar < -OPT_TOL
            cand[self.basic] = False
            cand[banned] = False
            cand[self._art_left] = False
            if not allow_artificials:
                cand[self.art0:] = False
            if ce_face is not None:
                pi_f = self.Binv.T @ ce_face[self.basic]
                cbar_f = ce_face - self.W.T @ pi_f
                cand &= np.abs(cbar_f) <= OPT_TOL
            idx = np.flatnonzero(cand)
            if idx.size == 0:
                if self._since_refactor:
                    self.refactorize()  # shed rank-1 update drift before reporting
                return OPTIMAL
            if self._consec_degen >= bland_after:
                self._bland_mode = True
            if self._bland_mode:
                j = int(idx[0])
            elif self._consec_degen >= SHUFFLE_TRIGGER:
                j = int(self._rng.choice(idx))  # escape degenerate pricing loops
            else:
                j = int(idx[np.argmin(cbar[idx])])
            if self.enter(j) is None:
                count += 1
                if self._since_refactor:
                    self.refactorize()  # stale pricing: re-derive before concluding
                    continue
                pi = self.Binv.T @ ce[self.basic]
                if ce[j] - self.W[:, j] @ pi <= -1e-7:
                    self.last_ray = self._build_ray(j)
                    return UNBOUNDED
                banned[j] = True  # noise-level direction with no blocking row
                continue
            count += 1

    def _build_ray(self, j):
        """Feasible ray over standard-form columns for entering column ``j``."""
        d = self.Binv @ self.W[:, j]
        ray = np.zeros(self.n)
        if j < self.n:
            ray[j] = 1.0
        real = self.basic < self.n
        ray[self.basic[real]] = -d[real]
        ray[np.abs(ray) < 1e-14] = 0.0
        return ray

    # ---- phases ----------------------------------------------------------

    def phase1(self):
        """Drive the artificial sum to zero; returns True iff feasible.

        The verdict is taken against the exact rhs; if the perturbed and
        exact artificial sums disagree at the tolerance boundary, the engine
        restarts once without perturbation and lets that run decide.  On
        infeasibility the Farkas certificate is available from
        ``farkas_certificate()``.
        """
        c1 = np.zeros(self.n)
        status = self.minimize(c1, allow_artificials=True, artificial_cost=1.0)
        if status != OPTIMAL:  # pragma: no cover - phase 1 is always bounded
            raise CycleLimitExceeded("phase 1 reported unbounded")
        scale = max(1.0, float(np.abs(self.b_exact).max(initial=0.0)))
        art = self.basic >= self.art0
        val_exact = float(np.sum(np.abs((self.Binv @ self.b_exact)[art])))
        if val_exact <= FEAS_TOL * scale:
            self._drive_out_artificials()
            return True
        ce = self._c_ext(c1, 1.0)
        sigma = self.Binv.T @ ce[self.basic]
        cert_value = float(sigma @ self.b_exact)
        if cert_value > 10.0 * FEAS_TOL * scale:
            self._phase1_duals = sigma * self.row_sign
            return False
        if (self.b != self.b_exact).any():
            # tolerance-boundary case: decide on unperturbed data
            self._reset(perturb=False)
            return self.phase1()
        self._phase1_duals = sigma * self.row_sign
        return False

    def _reset(self, perturb):
        self.b = self.b_exact.copy() if not perturb else self.b
        self.basic = np.arange(self.n, self.n_total)
        self.in_basis[:] = False
        self.in_basis[self.basic] = True
        self.Binv = np.eye(self.m)
        self.xB = self.b.copy()
        self._since_refactor = 0
        self._consec_degen = 0

    def farkas_certificate(self):
        return self._phase1_duals

    def _drive_out_artificials(self):
        """Pivot zero-level artificials out of the basis where possible."""
        for row in range(self.m):
            if self.basic[row] < self.art0:
                continue
            tab_row = self.Binv[row] @ self.W[:, : self.n]
            tab_row[self.in_basis[: self.n]] = 0.0
            j = int(np.argmax(np.abs(tab_row)))
            if abs(tab_row[j]) > ART_EXIT_TOL:
                d = self.Binv @ self.W[:, j]
                self.pivot(j, row, d)
            # otherwise the row is redundant; its artificial stays basic at zero


def _make_engine(lp_std):
    return SimplexEngine(lp_std.A, lp_std.rhs)


def solve_simplex(lp, warm=None):
    """Two-phase revised simplex for a (convertible-to) standard-form LP.

    ``warm`` is an optional :class:`Basis` over standard-form columns; it is
    used when it factorizes and is primal feasible, otherwise the solver falls
    back to a phase-1 start.  Dual values come back per original row.
    """
    std, cmap = to_standard_form(lp)
    eng = _make_engine(std)
    started = False
    if warm is not None:
        try:
            started = eng.set_basis(warm.basic)
        except (DimensionMismatch, np.linalg.LinAlgError):
            started = False
        if not started:
            eng = _make_engine(std)
    if not started:
        if not eng.phase1():
            return SimplexOutcome(
                INFEASIBLE,
                ray=eng.farkas_certificate(),
                degenerate_pivots=eng.degenerate_pivots,
                pivots=eng.pivots,
            )
    status = eng.minimize(std.cost)
    if status == UNBOUNDED:
        ray_std = eng.last_ray
        return SimplexOutcome(
            UNBOUNDED,
            ray=cmap.original(ray_std),
            degenerate_pivots=eng.degenerate_pivots,
            pivots=eng.pivots,
        )
    x_std = eng.x()
    return SimplexOutcome(
        OPTIMAL,
        x=cmap.original(x_std),
        objective=eng.objective(std.cost),
        duals=eng.duals(std.cost),
        basis=Basis(eng.basic, std.n_vars),
        degenerate_pivots=eng.degenerate_pivots,
        pivots=eng.pivots,
    )


def solve_dual_with_ray(sub, rhs_shift=None):
    """Solve the dual of a GE-form subproblem via its primal.

    ``sub`` is ``min c'x, Ax >= rhs, x >= 0``; ``rhs_shift`` is added to the
    rhs before solving (the master contribution ``-B y``).  The returned
    outcome describes the *dual* ``max (rhs)'pi, A'pi <= c, pi >= 0``:

    * ``OPTIMAL``: ``x`` holds the optimal dual vertex, ``duals`` the primal
      subproblem solution;
    * ``UNBOUNDED``: ``ray`` holds a dual extreme ray, certifying primal
      infeasibility.

    A primal-unbounded subproblem raises :class:`DualInfeasibleError`.
    """
    from .exceptions import DualInfeasibleError

    rhs = sub.rhs if rhs_shift is None else sub.rhs + np.asarray(rhs_shift, dtype=float)
    shifted = LinearProgram(sub.cost, sub.A, sub.senses, rhs)
    out = solve_simplex(shifted)
    if out.status == OPTIMAL:
        return SimplexOutcome(
            OPTIMAL,
            x=out.duals,
            objective=out.objective,
            duals=out.x,
            basis=out.basis,
            degenerate_pivots=out.degenerate_pivots,
            pivots=out.pivots,
        )
    if out.status == INFEASIBLE:
        return SimplexOutcome(
            UNBOUNDED,
            ray=out.ray,
            degenerate_pivots=out.degenerate_pivots,
            pivots=out.pivots,
        )
    raise DualInfeasibleError("subproblem is unbounded below, dual infeasible")
