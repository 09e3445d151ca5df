"""Bi-objective Benders simplex: frontier enumeration on the decomposed problem.

The master carries theta1/theta2 (split into nonnegative pairs) plus the
master variables and a growing cut pool; the subproblem is itself
bi-objective.  Each iteration explores one unexplored non-dominated point of
the master: the subproblem is solved parametrically at that point's master
solution, yielding either one feasibility cut or, per subproblem frontier
point i with weight interval [a_i, a_{i+1}], a weighted optimality cut at
``lam = a_i`` whose multiplier is the lam-combination of the two per-objective
dual vectors priced at that basis, plus one extra cut at ``lam = 0``.  The
master is then re-solved at the stored weight and walked parametrically to
the next unexplored point.  The loop ends when every master frontier point
has been explored; surviving explored points, filtered down to extreme ones,
form the answer.
"""

from __future__ import annotations

import time

import numpy as np

from .benders import (
    DEFAULT_BOX,
    CutPool,
    make_feasibility_cut,
    make_optimality_cut,
    master_blp,
    solve_single_benders,
    split_master_x,
)
from .biobj import (
    EXPLORED_TOL,
    POINT_TOL,
    BiObjectiveLP,
    Frontier,
    FrontierSegment,
    ParametricSimplex,
    solve_frontier,
)
from .exceptions import (
    InfeasibleError,
    IterationLimitError,
    SubproblemUnboundedError,
    UnboundedError,
)
from .lp import GE
from .stats import RunStats

DEFAULT_ITER_LIMIT = 100_000


class PointSet:
    """Objective-space points with tolerance-based membership."""

    def __init__(self, tol=EXPLORED_TOL):
        self.tol = tol
        self.points = []

    def add(self, z):
        self.points.append(np.asarray(z, dtype=float).reshape(2))

    def contains(self, z):
        z = np.asarray(z, dtype=float).reshape(2)
        return any(np.max(np.abs(z - p)) <= self.tol for p in self.points)

    def __len__(self):
        return len(self.points)


class SubFrontierPoint:
    """One subproblem frontier vertex with its per-objective duals."""

    def __init__(self, theta1, theta2, x, lam_hi, lam_lo, pi1, pi2):
        self.theta1 = float(theta1)
        self.theta2 = float(theta2)
        self.x = x
        self.lam_hi = float(lam_hi)
        self.lam_lo = float(lam_lo)
        self.pi1 = pi1
        self.pi2 = pi2


class ExploreOutcome:
    """Result of exploring one master point: a feasibility cut or the
    subproblem frontier together with its weighted optimality cuts."""

    def __init__(self, feasible, cut=None, cuts=(), points=(), degenerate_pivots=0):
        self.feasible = feasible
        self.cut = cut
        self.cuts = list(cuts)
        self.points = list(points)
        self.degenerate_pivots = degenerate_pivots

    @property
    def emitted_lambdas(self):
        return [c.lam for c in self.cuts]


def explore_point(prob, ybar, single_cut=False):
    """Solve the bi-objective subproblem at ``ybar`` and build its cuts.

    Returns an :class:`ExploreOutcome`.  With ``single_cut`` only the
    ``lam = 1`` and ``lam = 0`` cuts are produced (the deliberately deficient
    reformulation that misses frontier points whenever the subproblem has
    more than one non-dominated point).
    """
    walker = ParametricSimplex(prob.sub_blp(ybar))
    try:
        seg = walker.init_lexmin()
    except InfeasibleError as err:
        cut = make_feasibility_cut(prob, err.certificate, ybar=ybar)
        return ExploreOutcome(False, cut=cut)
    except UnboundedError as err:
        raise SubproblemUnboundedError(str(err)) from err

    raw = []  # (segment, pi1, pi2); duals priced where the vertex is first reached
    seg.lambda_hi = 1.0
    while True:
        pi1, pi2 = walker.duals_pair()
        raw.append((seg, pi1, pi2))
        try:
            step = walker.advance()
        except UnboundedError as err:
            raise SubproblemUnboundedError(str(err)) from err
        if step is None:
            break
        nxt, lam_star = step
        seg.lambda_lo = lam_star
        seg = nxt
    raw[-1][0].lambda_lo = 0.0
    # the lam=0 cut needs a dual optimal *for* lam=0: trailing degenerate
    # pivots may have moved the basis past the one stored in ``raw``
    pi2_final = walker.duals_pair()[1]

    points = []
    for seg, pi1, pi2 in raw:
        if points and seg.z2 <= points[-1].theta2 - POINT_TOL \
                and seg.z1 <= points[-1].theta1 + POINT_TOL:
            # the previous vertex was weakly dominated by this one
            hi = points.pop().lam_hi
            points.append(SubFrontierPoint(seg.z1, seg.z2, seg.x, hi,
                                           seg.lambda_lo, pi1, pi2))
        elif seg.weak and points:
            points[-1].lam_lo = seg.lambda_lo  # absorb interval, drop vertex
        else:
            points.append(SubFrontierPoint(seg.z1, seg.z2, seg.x, seg.lambda_hi,
                                           seg.lambda_lo, pi1, pi2))

    cuts = []
    if single_cut:
        cuts.append(make_optimality_cut(prob, points[0].pi1, 1.0))
        cuts.append(make_optimality_cut(prob, pi2_final, 0.0))
    else:
        for p in points:
            lam = p.lam_hi
            cuts.append(make_optimality_cut(
                prob, lam * p.pi1 + (1.0 - lam) * p.pi2, lam))
        cuts.append(make_optimality_cut(prob, pi2_final, 0.0))
    return ExploreOutcome(True, cuts=cuts, points=points,
                          degenerate_pivots=walker.degenerate_pivots())


class MasterPoint:
    """A master frontier vertex: objective pair, split solution, weight range."""

    def __init__(self, z, theta1, theta2, y, lam_hi, lam_lo):
        self.z = np.asarray(z, dtype=float).reshape(2)
        self.theta1 = float(theta1)
        self.theta2 = float(theta2)
        self.y = y
        self.lam_hi = float(lam_hi)
        self.lam_lo = float(lam_lo)


class ExplorationRecord:
    """Trace entry for one exploration: target point, weight interval, cuts."""

    def __init__(self, z, lam_hi, lam_lo, feasible, emitted_lambdas, n_new_cuts):
        self.z = np.asarray(z, dtype=float).reshape(2)
        self.lam_hi = float(lam_hi)
        self.lam_lo = float(lam_lo)
        self.feasible = feasible
        self.emitted_lambdas = list(emitted_lambdas)
        self.n_new_cuts = n_new_cuts


class _MasterView:
    """Parametric walker over the current master (cut pool included).

    ``box`` bounds every master column; it is engaged only after a master
    solve reports unboundedness (the relaxation can be unbounded while the
    true problem is not, until enough cuts accumulate).  Final solutions are
    checked against the box afterwards.
    """

    def __init__(self, prob, pool, box=None):
        self.prob = prob
        self.walker = ParametricSimplex(master_blp(prob, pool, box=box))

    def _point(self, seg):
        t1, t2, y = split_master_x(self.prob, seg.x, True)
        return MasterPoint(seg.z, t1, t2, y, seg.lambda_hi, seg.lambda_lo)

    def lexmin(self):
        return self._point(self.walker.init_lexmin())

    def at(self, lam):
        if lam >= 1.0 - 1e-12:
            return self.lexmin()
        return self._point(self.walker.position_at(lam))

    def advance(self):
        """Next strictly better (in z2) master vertex, skipping weak ones."""
        while True:
            step = self.walker.advance()
            if step is None:
                return None
            seg, _lam = step
            if not seg.weak:
                return self._point(seg)

    def degenerate_pivots(self):
        return self.walker.degenerate_pivots()

    def walk_to_unexplored(self, start, explored, point_tol=EXPLORED_TOL):
        """Walk from ``start`` to the first vertex not in ``explored``.

        Returns that vertex, or None once the z2-optimal end is reached with
        everything explored.
        """
        cur = start
        while explored.contains(cur.z):
            cur = self.advance()
            if cur is None:
                return None
        return cur

    def full_frontier(self):
        pts = [self.lexmin()]
        while True:
            nxt = self.advance()
            if nxt is None:
                return pts
            pts.append(nxt)


class BBSAResult:
    """Frontier of the reformulation plus bookkeeping.

    ``frontier`` segments carry ``x = [theta1, theta2, y...]``; ``solutions``
    holds per-point dicts with ``theta1``, ``theta2``, ``y`` and, when the
    exploring subproblem solve identified it, the subproblem solution
    ``x_sub`` attaining those theta values.
    """

    def __init__(self, frontier, stats, pool, trace, solutions):
        self.frontier = frontier
        self.stats = stats
        self.pool = pool
        self.trace = trace
        self.solutions = solutions

    def points(self):
        return self.frontier.points()


def filter_extreme(entries, point_tol=EXPLORED_TOL, collinear_tol=1e-7):
    """Keep only extreme non-dominated points of a point list.

    Sorts by z1, drops duplicates, dominated and weakly dominated points,
    then removes points lying on the segment of their neighbours
    (cross-product test).  ``entries`` are ``(z1, z2, payload...)`` tuples or
    bare pairs; the filtered list keeps the input form.
    """
    items = sorted((tuple(e) for e in entries), key=lambda t: (t[0], t[1]))
    kept = []
    for t in items:
        if kept and abs(t[0] - kept[-1][0]) <= point_tol \
                and abs(t[1] - kept[-1][1]) <= point_tol:
            continue
        kept.append(t)
    nondom = []
    for t in kept:
        if nondom:
            last = nondom[-1]
            if t[1] >= last[1] - point_tol:
                continue  # dominated (weakly) by the previous kept point
            if t[0] <= last[0] + point_tol:
                nondom.pop()  # same z1, strictly better z2: replace
        nondom.append(t)
    changed = True
    while changed and len(nondom) > 2:
        changed = False
        out = [nondom[0]]
        for k in range(1, len(nondom) - 1):
            a, m, b = out[-1], nondom[k], nondom[k + 1]
            cross = (m[0] - a[0]) * (b[1] - a[1]) - (m[1] - a[1]) * (b[0] - a[0])
            if abs(cross) <= collinear_tol * max(1.0, abs(b[0] - a[0]), abs(b[1] - a[1])):
                changed = True
                continue
            out.append(m)
        out.append(nondom[-1])
        nondom = out
    return nondom


def _chord_lambda(za, zb):
    """Weight at which two points have equal weighted objective value."""
    num = za[1] - zb[1]
    den = (za[1] - zb[1]) + (zb[0] - za[0])
    return num / den if abs(den) > 1e-15 else 0.5


def _lambda_intervals(points):
    """Tile [0, 1] across a z1-sorted extreme point list via chord weights."""
    lams = [1.0]
    for i in range(len(points) - 1):
        lams.append(_chord_lambda(points[i], points[i + 1]))
    lams.append(0.0)
    for i in range(1, len(lams)):
        lams[i] = min(lams[i], lams[i - 1])
    return [(lams[i], lams[i + 1]) for i in range(len(points))]


def count_active_cuts(prob, pool, solutions, tol=1e-7):
    """Distinct pool cuts binding at >= 1 final extreme master solution."""
    active = 0
    for cut in pool:
        for sol in solutions:
            if abs(cut.value(prob, sol["theta1"], sol["theta2"], sol["y"])) <= tol:
                active += 1
                break
    return active


def _assemble(prob, entries, pool, trace, stats, t0):
    finals = filter_extreme(entries)
    intervals = _lambda_intervals(finals)
    segments = []
    solutions = []
    for (z1, z2, payload), (hi, lo) in zip(finals, intervals):
        t1, t2, y, xsub = payload
        segments.append(FrontierSegment(z1, z2, np.concatenate([[t1, t2], y]), hi, lo))
        solutions.append({"theta1": t1, "theta2": t2, "y": y, "x_sub": xsub})
    frontier = Frontier(segments)
    stats.frontier_size = len(segments)
    stats.active_cuts = count_active_cuts(prob, pool, solutions)
    stats.total_time = time.perf_counter() - t0
    return BBSAResult(frontier, stats, pool, trace, solutions)


def _master_only_result(prob, stats, t0):
    blp = BiObjectiveLP(prob.f1, prob.f2, prob.D, [GE] * prob.m_master, prob.d)
    tm = time.perf_counter()
    frontier = solve_frontier(blp)
    stats.time_master += time.perf_counter() - tm
    entries = [(s.z1, s.z2, (0.0, 0.0, s.x, np.zeros(0))) for s in frontier]
    return _assemble(prob, entries, CutPool(), [], stats, t0)


def run_bbsa(prob, tol=1e-7, iter_limit=DEFAULT_ITER_LIMIT, single_cut=False,
             point_tol=EXPLORED_TOL):
    """Enumerate the extreme non-dominated frontier of a decomposed problem.

    Returns a :class:`BBSAResult`; its frontier equals the frontier of the
    undecomposed problem.  ``single_cut`` switches to the deficient
    single-objective-cuts-only variant (kept for demonstration; it can return
    points that are unattainable in objective space).
    """
    t0 = time.perf_counter()
    stats = RunStats()
    if prob.n_sub == 0 and prob.m_sub == 0:
        return _master_only_result(prob, stats, t0)

    pool = CutPool()
    tb = time.perf_counter()
    init = solve_single_benders(prob, 1.0, tol, pool, iter_limit=max(iter_limit, 1000))
    stats.time_initial_benders = time.perf_counter() - tb
    stats.feasibility_cuts += init.emitted_feasibility
    stats.optimality_cuts += init.emitted_optimality

    explored = PointSet(point_tol)
    recorded = []  # (z, theta1, theta2, y, x_sub)
    trace = []
    bs_support = []  # (ybar, [(theta1, theta2, x_sub), ...]) per exploration

    def do_explore(ybar):
        stats.iterations += 1
        ts = time.perf_counter()
        out = explore_point(prob, ybar, single_cut=single_cut)
        stats.time_subproblem += time.perf_counter() - ts
        stats.degenerate_pivots_sub += out.degenerate_pivots
        new = []
        if out.feasible:
            stats.optimality_cuts += len(out.cuts)
            for c in out.cuts:
                if pool.add(c):
                    new.append(c)
            bs_support.append((np.asarray(ybar, dtype=float).copy(),
                               [(p.theta1, p.theta2, p.x) for p in out.points]))
        else:
            stats.feasibility_cuts += 1
            if pool.add(out.cut):
                new.append(out.cut)
        return out, new

    def supported(pt):
        """Subproblem solution matching ``pt``'s (y, theta) from a past explore."""
        for ybar, vals in bs_support:
            if np.max(np.abs(ybar - pt.y), initial=0.0) <= 1e-8:
                for t1, t2, x in vals:
                    if abs(t1 - pt.theta1) <= 1e-7 and abs(t2 - pt.theta2) <= 1e-7:
                        return x
        return None

    def record(pt, x_sub):
        recorded.append((pt.z.copy(), pt.theta1, pt.theta2,
                         np.asarray(pt.y, dtype=float).copy(), x_sub))

    use_box = False

    def master_op(fn):
        """Build a fresh master view and run ``fn(view)`` on it, engaging the
        column box when the relaxed master turns out unbounded."""
        nonlocal use_box
        while True:
            view = _MasterView(prob, pool, box=DEFAULT_BOX if use_box else None)
            tm = time.perf_counter()
            try:
                result = fn(view)
            except UnboundedError:
                stats.time_master += time.perf_counter() - tm
                stats.degenerate_pivots_master += view.degenerate_pivots()
                if use_box:
                    raise
                use_box = True
                continue
            stats.time_master += time.perf_counter() - tm
            stats.degenerate_pivots_master += view.degenerate_pivots()
            return result

    def anchor_pass(view):
        cand = view.lexmin()
        if supported(cand) is None:
            return cand, None
        if not explored.contains(cand.z):
            explored.add(cand.z)
        return cand, (view.walk_to_unexplored(cand, explored, point_tol),)

    def advance_pass(lam):
        def op(view):
            return view.walk_to_unexplored(view.at(lam), explored, point_tol)
        return op

    def cut_off_by(new_cuts, pt):
        """Did any of the freshly added cuts remove this master point?

        Cuts only shrink the master, so a point that stays feasible stays
        non-dominated; feasibility against the new rows decides survival.
        """
        scale = 1.0 + abs(pt.theta1) + abs(pt.theta2)
        return any(c.value(prob, pt.theta1, pt.theta2, pt.y) < -1e-7 * scale
                   for c in new_cuts)

    def sweep_pass(view):
        for pt in view.full_frontier():
            if not explored.contains(pt.z):
                return pt
        return None

    # First exploration: the Benders incumbent.  Then anchor the run at the
    # master's lexicographic optimum, exploring until that point is supported
    # by subproblem values (it then provably survives its own cuts).
    out, _ = do_explore(init.y)
    if not out.feasible:  # pragma: no cover - the incumbent's subproblem is feasible
        raise InfeasibleError("subproblem infeasible at the Benders incumbent")
    anchor = None
    last_lambdas = out.emitted_lambdas
    for _ in range(iter_limit):
        cand, walked = master_op(anchor_pass)
        x_sub = supported(cand)
        if x_sub is not None:
            anchor, anchor_x = cand, x_sub
            break
        out, _ = do_explore(cand.y)
        last_lambdas = out.emitted_lambdas if out.feasible else []
        explored.add(cand.z)
    if anchor is None:
        raise IterationLimitError("lexicographic anchor did not stabilize")
    record(anchor, anchor_x)
    trace.append(ExplorationRecord(anchor.z, 1.0, anchor.lam_lo, True,
                                   last_lambdas, 0))
    (target,) = walked
    last_feasible_lam = 1.0

    while target is not None:
        if stats.iterations >= iter_limit:
            raise IterationLimitError("exploration limit reached")
        out, new_cuts = do_explore(target.y)
        explored.add(target.z)
        trace.append(ExplorationRecord(target.z, target.lam_hi, target.lam_lo,
                                       out.feasible, out.emitted_lambdas,
                                       len(new_cuts)))
        if not cut_off_by(new_cuts, target):
            record(target, supported(target))
            if out.feasible:
                last_feasible_lam = target.lam_hi
        restart_lam = target.lam_hi if out.feasible else last_feasible_lam
        nxt = master_op(advance_pass(restart_lam))
        if nxt is None:
            # safety sweep: newer cuts may have re-shaped parts of the frontier
            # the directed walk no longer visits
            nxt = master_op(sweep_pass)
        target = nxt

    if use_box:
        for z, t1, t2, y, _xs in recorded:
            if max(abs(t1), abs(t2), float(np.max(np.abs(y), initial=0.0))) \
                    >= DEFAULT_BOX * (1.0 - 1e-6):
                raise UnboundedError("master box active at a recorded point")
    stats.explored_points = len(explored)
    entries = [(z[0], z[1], (t1, t2, y, xs)) for z, t1, t2, y, xs in recorded]
    return _assemble(prob, entries, pool, trace, stats, t0)


def run_single_cut_mode(prob, tol=1e-7, iter_limit=DEFAULT_ITER_LIMIT,
                        point_tol=EXPLORED_TOL):
    """Deficient variant emitting only lam=1 and lam=0 cuts per exploration."""
    return run_bbsa(prob, tol=tol, iter_limit=iter_limit, single_cut=True,
                    point_tol=point_tol)
