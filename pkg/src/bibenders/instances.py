"""Benchmark instance families, decomposition mappers, and file round-trip.

Three structured families plus a generic random decomposed problem:

* fixed-charge transportation (continuous relaxation): per-arc flow ``x``
  with unit costs and per-arc open indicator ``y`` with fixed charges;
  supplies/demands balanced, linking rows ``x_ij <= min(s_i, d_j) y_ij``;
  ``y`` in the master, ``x`` in the subproblem.
* portfolio with violation budget: asset weights ``y`` (unit budget), per
  scenario violation amounts ``x`` bounded by 1 and summing to at most k;
  ``y`` in the master, ``x`` in the subproblem.
* multiple knapsack (continuous relaxation): item groups ``y``/``z`` cover
  one knapsack set in the master, group ``x`` joins ``y`` covering the other
  set in the subproblem.

Generators are pure functions of their arguments and a seed.  Instances can
be written/parsed in a line-oriented text format whose float rendering uses
the shortest exact decimal (round-trips bit-for-bit).
"""

from __future__ import annotations

import numpy as np

from .benders import DecomposedBLP
from .exceptions import InvalidDimensionError, ParseError, VersionMismatchError

FORMAT_HEADER = "BIBENDERS v1"


class BFCTPInstance:
    """Bi-objective fixed-charge transportation data.

    ``supply``/``demand`` are balanced; ``c1``/``c2`` are per-unit cost
    matrices, ``f1``/``f2`` fixed-charge matrices, all sources x sinks.
    """

    def __init__(self, supply, demand, c1, c2, f1, f2, ratio_theta):
        self.supply = np.asarray(supply, dtype=float)
        self.demand = np.asarray(demand, dtype=float)
        self.n_sources = self.supply.size
        self.m_sinks = self.demand.size
        shape = (self.n_sources, self.m_sinks)
        self.c1 = np.asarray(c1, dtype=float).reshape(shape)
        self.c2 = np.asarray(c2, dtype=float).reshape(shape)
        self.f1 = np.asarray(f1, dtype=float).reshape(shape)
        self.f2 = np.asarray(f2, dtype=float).reshape(shape)
        self.ratio_theta = float(ratio_theta)

    @property
    def big_m(self):
        return np.minimum.outer(self.supply, self.demand)

    def meta(self):
        return {"family": "bfctp", "n": str(self.n_sources),
                "m": str(self.m_sinks), "theta": repr(self.ratio_theta)}


class BPPInstance:
    """Bi-objective portfolio data: scenario returns, target, violation budget."""

    def __init__(self, returns, r, k, c1, c2, f1, f2):
        self.returns = np.asarray(returns, dtype=float)
        self.m_scenarios, self.n_assets = self.returns.shape
        self.r = float(r)
        self.k = float(k)
        self.c1 = np.asarray(c1, dtype=float)
        self.c2 = np.asarray(c2, dtype=float)
        self.f1 = np.asarray(f1, dtype=float)
        self.f2 = np.asarray(f2, dtype=float)
        if self.k < 0:
            raise InvalidDimensionError("violation budget k must be nonnegative")

    def meta(self):
        return {"family": "bpp", "n": str(self.n_assets),
                "m": str(self.m_scenarios), "k": repr(self.k)}


class BMKPInstance:
    """Bi-objective multiple-knapsack data (three item groups, two row sets).

    Weights: ``a`` (I x L), ``b`` (J x L) cover the master knapsack rows with
    thresholds ``gamma``; ``e`` (I x M), ``f`` (K x M) cover the subproblem
    rows with thresholds ``delta``.
    """

    def __init__(self, a, b, e, f, gamma, delta, c1, c2, f1, f2, q1, q2):
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.e = np.asarray(e, dtype=float)
        self.f = np.asarray(f, dtype=float)
        self.gamma = np.asarray(gamma, dtype=float)
        self.delta = np.asarray(delta, dtype=float)
        self.c1 = np.asarray(c1, dtype=float)
        self.c2 = np.asarray(c2, dtype=float)
        self.f1 = np.asarray(f1, dtype=float)
        self.f2 = np.asarray(f2, dtype=float)
        self.q1 = np.asarray(q1, dtype=float)
        self.q2 = np.asarray(q2, dtype=float)
        self.n_i = self.a.shape[0]
        self.n_j = self.b.shape[0]
        self.n_k = self.f.shape[0]
        self.n_l = self.a.shape[1]
        self.n_m = self.e.shape[1]

    def meta(self):
        return {"family": "bmkp", "items": f"{self.n_i}/{self.n_j}/{self.n_k}",
                "knapsacks": f"{self.n_l}+{self.n_m}"}


# ---- generators -------------------------------------------------------------


def gen_bfctp(n, m, ratio_theta, seed):
    """Balanced fixed-charge transportation instance, deterministic per seed.

    Unit costs are scaled so the unit-cost mass ``sum(c1 * min(s_i, d_j))``
    equals ``theta/(1-theta)`` times the fixed-cost total (zero when
    ``ratio_theta`` is 0, the pure fixed-charge case).
    """
    if n < 1 or m < 1:
        raise InvalidDimensionError("need at least one source and one sink")
    if not 0.0 <= ratio_theta < 1.0:
        raise InvalidDimensionError("ratio_theta must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    demand = rng.integers(10, 51, m).astype(float)
    total = demand.sum()
    raw = rng.integers(10, 51, n).astype(float)
    supply = np.floor(raw * total / raw.sum())
    short = int(total - supply.sum())
    supply[:short] += 1.0  # largest-remainder style fixup keeps totals equal
    f1 = rng.integers(100, 1001, (n, m)).astype(float)
    f2 = rng.integers(100, 1001, (n, m)).astype(float)
    big_m = np.minimum.outer(supply, demand)
    if ratio_theta == 0.0:
        c1 = np.zeros((n, m))
        c2 = np.zeros((n, m))
    else:
        factor = ratio_theta / (1.0 - ratio_theta)
        raw1 = rng.uniform(1.0, 20.0, (n, m))
        raw2 = rng.uniform(1.0, 20.0, (n, m))
        c1 = raw1 * (factor * f1.sum() / float((raw1 * big_m).sum()))
        c2 = raw2 * (factor * f2.sum() / float((raw2 * big_m).sum()))
    return BFCTPInstance(supply, demand, c1, c2, f1, f2, ratio_theta)


def gen_bpp(n, m, k, seed):
    """Portfolio instance: one always-sufficient asset keeps it feasible."""
    if n < 1 or m < 1:
        raise InvalidDimensionError("need at least one asset and one scenario")
    if k < 0:
        raise InvalidDimensionError("violation budget k must be nonnegative")
    rng = np.random.default_rng(seed)
    r = 1.0
    returns = rng.uniform(0.9, 1.2, (m, n))
    returns[:, 0] = rng.uniform(1.0, 1.1, m)  # safe asset column
    c1 = rng.uniform(1.0, 20.0, m)
    c2 = rng.uniform(1.0, 20.0, m)
    f1 = rng.integers(100, 1001, n).astype(float)
    f2 = rng.integers(100, 1001, n).astype(float)
    return BPPInstance(returns, r, float(k), c1, c2, f1, f2)


def gen_bmkp(n_i=120, n_j=120, n_k=120, n_l=50, n_m=5, seed=0):
    """Multiple-knapsack instance; thresholds are 30-70% of each row's mass.

    First-objective item costs in the subproblem group are all ones; the
    second objective draws from a five-fold wider range than the master
    costs.
    """
    if min(n_i, n_j, n_k, n_l, n_m) < 1:
        raise InvalidDimensionError("all item/knapsack set sizes must be >= 1")
    rng = np.random.default_rng(seed)
    a = rng.integers(1, 21, (n_i, n_l)).astype(float)
    b = rng.integers(1, 21, (n_j, n_l)).astype(float)
    e = rng.integers(1, 21, (n_i, n_m)).astype(float)
    f = rng.integers(1, 21, (n_k, n_m)).astype(float)
    gamma = np.round(rng.uniform(0.3, 0.7, n_l) * (a.sum(axis=0) + b.sum(axis=0)))
    delta = np.round(rng.uniform(0.3, 0.7, n_m) * (e.sum(axis=0) + f.sum(axis=0)))
    c1 = np.ones(n_k)
    c2 = rng.integers(1, 101, n_k).astype(float)
    f1 = rng.integers(1, 21, n_i).astype(float)
    f2 = rng.integers(1, 101, n_i).astype(float)
    q1 = rng.integers(1, 21, n_j).astype(float)
    q2 = rng.integers(1, 101, n_j).astype(float)
    return BMKPInstance(a, b, e, f, gamma, delta, c1, c2, f1, f2, q1, q2)


def gen_raw(n, q, ms, mm, seed, zero_c2=False):
    """Generic random decomposed problem, feasible and compact by construction.

    A random nonnegative point seeds the right-hand sides; extra rows bound
    the variable sums so every weighted problem is bounded.  ``zero_c2``
    zeroes the subproblem's second-objective costs (the regime where only
    single-objective cuts are ever needed).
    """
    if min(n, q) < 1 or min(ms, mm) < 0:
        raise InvalidDimensionError("need n, q >= 1 and nonnegative row counts")
    rng = np.random.default_rng(seed)
    A = rng.integers(-4, 5, (ms, n)).astype(float)
    B = rng.integers(-4, 5, (ms, q)).astype(float)
    D = rng.integers(-4, 5, (mm, q)).astype(float)
    x0 = rng.uniform(0, 2, n)
    y0 = rng.uniform(0, 2, q)
    b = A @ x0 + B @ y0 - rng.uniform(0, 2, ms)
    d = D @ y0 - rng.uniform(0, 2, mm)
    A = np.vstack([A, -np.ones((1, n)), np.zeros((1, n))])
    B = np.vstack([B, np.zeros((1, q)), -np.ones((1, q))])
    b = np.concatenate([b, [-20.0 * n], [-20.0 * q]])
    c1 = rng.integers(-5, 6, n).astype(float)
    c2 = np.zeros(n) if zero_c2 else rng.integers(-5, 6, n).astype(float)
    f1 = rng.integers(-5, 6, q).astype(float)
    f2 = rng.integers(-5, 6, q).astype(float)
    prob = DecomposedBLP(A, B, D, b, d, c1, c2, f1, f2)
    prob.meta = {"family": "raw", "n": str(n), "q": str(q), "seed": str(seed)}
    return prob


# ---- decomposition mappers --------------------------------------------------


def _decompose_bfctp(inst):
    n, m = inst.n_sources, inst.m_sinks
    arcs = n * m
    big_m = inst.big_m.reshape(-1)
    A = np.zeros((n + m + arcs, arcs))
    B = np.zeros((n + m + arcs, arcs))
    b = np.zeros(n + m + arcs)
    for i in range(n):  # supply rows: -sum_j x_ij >= -s_i
        A[i, i * m:(i + 1) * m] = -1.0
        b[i] = -inst.supply[i]
    for j in range(m):  # demand rows: sum_i x_ij >= d_j
        A[n + j, j::m] = 1.0
        b[n + j] = inst.demand[j]
    for k in range(arcs):  # linking rows: -x_ij + m_ij y_ij >= 0
        A[n + m + k, k] = -1.0
        B[n + m + k, k] = big_m[k]
    D = -np.eye(arcs)
    d = -np.ones(arcs)
    return DecomposedBLP(A, B, D, b, d,
                         inst.c1.reshape(-1), inst.c2.reshape(-1),
                         inst.f1.reshape(-1), inst.f2.reshape(-1))


def _decompose_bpp(inst):
    n, m = inst.n_assets, inst.m_scenarios
    A = np.vstack([inst.r * np.eye(m), -np.ones((1, m)), -np.eye(m)])
    B = np.vstack([inst.returns, np.zeros((1, n)), np.zeros((m, n))])
    b = np.concatenate([np.full(m, inst.r), [-inst.k], -np.ones(m)])
    D = np.vstack([np.ones((1, n)), -np.ones((1, n))])  # unit budget as two rows
    d = np.array([1.0, -1.0])
    return DecomposedBLP(A, B, D, b, d, inst.c1, inst.c2, inst.f1, inst.f2)


def _decompose_bmkp(inst):
    ni, nj, nk = inst.n_i, inst.n_j, inst.n_k
    nl, nm = inst.n_l, inst.n_m
    A = np.vstack([inst.f.T, -np.eye(nk)])
    B = np.vstack([np.hstack([inst.e.T, np.zeros((nm, nj))]),
                   np.zeros((nk, ni + nj))])
    b = np.concatenate([inst.delta, -np.ones(nk)])
    D = np.vstack([
        np.hstack([inst.a.T, inst.b.T]),
        np.hstack([-np.eye(ni), np.zeros((ni, nj))]),
        np.hstack([np.zeros((nj, ni)), -np.eye(nj)]),
    ])
    d = np.concatenate([inst.gamma, -np.ones(ni), -np.ones(nj)])
    return DecomposedBLP(A, B, D, b, d,
                         inst.c1, inst.c2,
                         np.concatenate([inst.f1, inst.q1]),
                         np.concatenate([inst.f2, inst.q2]))


def decompose(instance):
    """Map a family instance to its master/subproblem block form."""
    if isinstance(instance, DecomposedBLP):
        return instance
    if isinstance(instance, BFCTPInstance):
        prob = _decompose_bfctp(instance)
    elif isinstance(instance, BPPInstance):
        prob = _decompose_bpp(instance)
    elif isinstance(instance, BMKPInstance):
        prob = _decompose_bmkp(instance)
    else:
        raise TypeError(f"cannot decompose {type(instance).__name__}")
    prob.meta = instance.meta()
    return prob


# ---- text format ------------------------------------------------------------


def _fmt(v):
    return repr(float(v))


def write_instance(instance, path, meta=None):
    """Write the decomposed block form; floats render shortest-exact."""
    prob = decompose(instance)
    info = dict(getattr(prob, "meta", {}) or {})
    if meta:
        info.update({str(k): str(v) for k, v in meta.items()})
    lines = [FORMAT_HEADER]
    for key in sorted(info):
        lines.append(f"META {key} {info[key]}")
    lines.append(f"DIMS {prob.n_sub} {prob.n_master} {prob.m_sub} {prob.m_master}")
    for name in ("c1", "c2", "f1", "f2", "b", "d"):
        vec = getattr(prob, name)
        lines.append(name)
        if vec.size:
            lines.append(" ".join(_fmt(v) for v in vec))
    for name in ("A", "B", "D"):
        mat = getattr(prob, name)
        lines.append(name)
        for row in mat:
            lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


_VEC_SECTIONS = {"c1": "n", "c2": "n", "f1": "q", "f2": "q", "b": "ms", "d": "mm"}
_MAT_SECTIONS = {"A": ("ms", "n"), "B": ("ms", "q"), "D": ("mm", "q")}


class _Reader:
    def __init__(self, path):
        with open(path, "r", encoding="ascii", errors="replace") as fh:
            self.lines = fh.read().splitlines()
        self.pos = 0

    def next_payload(self, required=True):
        """Next non-comment, non-blank line with its 1-based number."""
        while self.pos < len(self.lines):
            self.pos += 1
            raw = self.lines[self.pos - 1]
            body = raw.split("#", 1)[0].rstrip()
            if body.strip():
                return body, self.pos
        if required:
            raise ParseError("unexpected end of file", line=len(self.lines) or 1)
        return None, self.pos


def _parse_floats(text, lineno, expected):
    tokens = text.split()
    if len(tokens) != expected:
        raise ParseError(f"expected {expected} values, found {len(tokens)}",
                         line=lineno)
    out = np.empty(expected)
    col = 1
    for i, tok in enumerate(tokens):
        col = text.find(tok, col - 1) + 1
        try:
            out[i] = float(tok)
        except ValueError:
            raise ParseError(f"bad number {tok!r}", line=lineno, column=col) from None
    return out


def read_instance(path):
    """Parse the v1 text format back into a :class:`DecomposedBLP`.

    Metadata lines are returned on the problem's ``meta`` dict.  Malformed
    content raises :class:`ParseError` with a 1-based line (and column for
    bad numbers); a wrong header raises :class:`VersionMismatchError`.
    """
    rd = _Reader(path)
    first, lineno = rd.next_payload()
    if first.strip() != FORMAT_HEADER:
        if first.strip().startswith("BIBENDERS"):
            raise VersionMismatchError(
                f"unsupported format version {first.strip()!r}", line=lineno)
        raise ParseError("missing BIBENDERS header", line=lineno)
    meta = {}
    dims = None
    fields = {}
    while True:
        line, lineno = rd.next_payload(required=False)
        if line is None:
            break
        head = line.split()[0]
        if head == "META":
            parts = line.split(None, 2)
            if len(parts) < 2:
                raise ParseError("META needs a key", line=lineno)
            meta[parts[1]] = parts[2] if len(parts) > 2 else ""
        elif head == "DIMS":
            vals = line.split()[1:]
            if len(vals) != 4:
                raise ParseError("DIMS needs 4 integers", line=lineno)
            try:
                dims = {k: int(v) for k, v in zip(("n", "q", "ms", "mm"), vals)}
            except ValueError:
                raise ParseError("DIMS values must be integers", line=lineno) from None
        elif head in _VEC_SECTIONS:
            if dims is None:
                raise ParseError(f"section {head} before DIMS", line=lineno)
            size = dims[_VEC_SECTIONS[head]]
            if size == 0:
                fields[head] = np.zeros(0)
            else:
                payload, pl = rd.next_payload()
                fields[head] = _parse_floats(payload, pl, size)
        elif head in _MAT_SECTIONS:
            if dims is None:
                raise ParseError(f"section {head} before DIMS", line=lineno)
            rows_key, cols_key = _MAT_SECTIONS[head]
            rows, cols = dims[rows_key], dims[cols_key]
            mat = np.zeros((rows, cols))
            for r in range(rows):
                payload, pl = rd.next_payload()
                mat[r] = _parse_floats(payload, pl, cols)
            fields[head] = mat
        else:
            raise ParseError(f"unknown section {head!r}", line=lineno)
    if dims is None:
        raise ParseError("missing DIMS section", line=1)
    missing = [s for s in list(_VEC_SECTIONS) + list(_MAT_SECTIONS) if s not in fields]
    if missing:
        raise ParseError(f"missing sections: {', '.join(missing)}",
                         line=len(rd.lines) or 1)
    prob = DecomposedBLP(fields["A"], fields["B"], fields["D"],
                         fields["b"], fields["d"],
                         fields["c1"], fields["c2"], fields["f1"], fields["f2"])
    prob.meta = meta
    return prob


def example1():
    """The five-variable worked instance shipped with the package."""
    return read_instance(example1_path())


def example1_path():
    from importlib.resources import files

    return str(files("bibenders").joinpath("data/example1.txt"))
