"""Run statistics shared by the solvers and the benchmark harness."""

from __future__ import annotations


STATS_COLUMNS = [
    "frontier_size",
    "feasibility_cuts",
    "optimality_cuts",
    "active_cuts",
    "iterations",
    "total_time",
    "pct_initial_benders",
    "pct_master",
    "pct_subproblem",
    "explored_points",
    "degenerate_pivots_master",
    "degenerate_pivots_sub",
    "dba_solve_count",
    "dba_time_ratio",
]


class RunStats:
    """One run's counters and component time split.

    ``feasibility_cuts``/``optimality_cuts`` count cuts *emitted* by
    subproblem solves (duplicates included); ``active_cuts`` counts distinct
    pool cuts binding at at least one final extreme master solution.
    Percentages are of wall time measured with a monotonic clock; their sum
    stays below 100, the remainder being bookkeeping overhead.
    ``iterations`` counts main-loop passes (one explored point each).
    """

    def __init__(self):
        self.frontier_size = 0
        self.feasibility_cuts = 0
        self.optimality_cuts = 0
        self.active_cuts = 0
        self.iterations = 0
        self.total_time = 0.0
        self.time_initial_benders = 0.0
        self.time_master = 0.0
        self.time_subproblem = 0.0
        self.explored_points = 0
        self.degenerate_pivots_master = 0
        self.degenerate_pivots_sub = 0
        self.dba_solve_count = 0
        self.dba_time_ratio = None

    def _pct(self, t):
        return 100.0 * t / self.total_time if self.total_time > 0 else 0.0

    @property
    def pct_initial_benders(self):
        return self._pct(self.time_initial_benders)

    @property
    def pct_master(self):
        return self._pct(self.time_master)

    @property
    def pct_subproblem(self):
        return self._pct(self.time_subproblem)

    def as_dict(self):
        d = {}
        for k in STATS_COLUMNS:
            v = getattr(self, k)
            d[k] = "" if v is None else v
        return d

    def __repr__(self):
        return (f"RunStats(|Zn|={self.frontier_size}, FC={self.feasibility_cuts}, "
                f"OC={self.optimality_cuts}, AC={self.active_cuts}, "
                f"it={self.iterations}, t={self.total_time:.3f}s)")
