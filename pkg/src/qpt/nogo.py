"""No-go machinery: noncontextual {0,1}-assignment search on finite ray sets,
local-hidden-variable feasibility for bipartite correlation tables, and the
CHSH quantity with its brute-force classical bound."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DimMismatch,
    MalformedContext,
    RayFileError,
    TableShapeMismatch,
    ZeroVector,
)
from .linalg import DEFAULT_TOL, ComplexVector, Operator, Tolerance, canonical_phase


@dataclass(frozen=True, eq=False)
class RaySet:
    """Unit rays in a common dimension, with measurement contexts derived as
    the maximal mutually-orthogonal subsets of size equal to the dimension."""

    rays: tuple[ComplexVector, ...]

    def __post_init__(self) -> None:
        rays = list(self.rays)
        if not rays:
            raise ValueError("empty ray set")
        dim = rays[0].dim
        tol = DEFAULT_TOL
        for k, r in enumerate(rays):
            if r.dim != dim:
                raise DimMismatch(f"mixed dims {dim} vs {r.dim}")
            n = r.norm()
            if abs(n - 1.0) > 1e-6:
                raise ValueError("rays must be unit vectors")
            rays[k] = ComplexVector(r.amplitudes / n)
        rays = tuple(rays)
        object.__setattr__(self, "rays", rays)
        m = len(rays)
        orth = np.zeros((m, m), dtype=bool)
        for i in range(m):
            for j in range(i + 1, m):
                ov = abs(rays[i].inner(rays[j]))
                if ov >= 1.0 - tol.eps * dim:
                    raise ValueError(f"rays {i} and {j} coincide up to phase")
                orth[i, j] = orth[j, i] = ov <= tol.eps * dim
        object.__setattr__(self, "_orth", orth)
        object.__setattr__(self, "contexts", _dim_cliques(orth, dim))

    @property
    def dim(self) -> int:
        return self.rays[0].dim

    def orthogonal(self, i: int, j: int) -> bool:
        return bool(self._orth[i, j])

    @classmethod
    def from_vectors(cls, vectors, tol: Tolerance = DEFAULT_TOL) -> "RaySet":
        rays = []
        for v in vectors:
            vec = v if isinstance(v, ComplexVector) else ComplexVector(np.asarray(v, complex))
            rays.append(ComplexVector(canonical_phase(vec.normalized(tol).amplitudes)))
        return cls(tuple(rays))

    @classmethod
    def from_file(cls, path, tol: Tolerance = DEFAULT_TOL) -> "RaySet":
        """Parse a ray file: one ray per line, comma-separated complex
        components (re+imj form), '#' starts a comment, dimension inferred."""
        text = Path(path).read_text(encoding="utf-8")
        vectors = []
        dim = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                comps = [complex(tok.strip().replace(" ", "")) for tok in line.split(",")]
            except ValueError as exc:
                raise RayFileError(f"{path}:{lineno}: {exc}") from exc
            if dim is None:
                dim = len(comps)
            elif len(comps) != dim:
                raise RayFileError(
                    f"{path}:{lineno}: expected {dim} components, got {len(comps)}")
            vectors.append(np.asarray(comps, dtype=complex))
        if not vectors:
            raise RayFileError(f"{path}: no rays found")
        try:
            return cls.from_vectors(vectors, tol)
        except (ValueError, ZeroVector, DimMismatch) as exc:
            raise RayFileError(f"{path}: {exc}") from exc


def _dim_cliques(orth: np.ndarray, dim: int) -> tuple[tuple[int, ...], ...]:
    """Maximal cliques of the orthogonality graph, keeping those of size dim.
    Bron-Kerbosch with pivoting; output canonically sorted."""
    m = orth.shape[0]
    adj = [frozenset(np.flatnonzero(orth[i]).tolist()) for i in range(m)]
    found: set[tuple[int, ...]] = set()

    def expand(r: set, p: set, x: set) -> None:
        if not p and not x:
            if len(r) == dim:
                found.add(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: len(adj[u] & p))
        for vtx in sorted(p - adj[pivot]):
            expand(r | {vtx}, p & adj[vtx], x & adj[vtx])
            p = p - {vtx}
            x = x | {vtx}

    expand(set(), set(range(m)), set())
    return tuple(sorted(found))


@dataclass(frozen=True)
class Assignment:
    """A noncontextual truth assignment: values[i] for ray i."""

    values: tuple[int, ...]

    def ones(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.values) if v == 1)


@dataclass(frozen=True)
class NoAssignment:
    """Unsatisfiability witness: a deletion-minimal core of context indices."""

    witness: tuple[int, ...]


def _solve_coloring(
    m: int,
    contexts: tuple[tuple[int, ...], ...],
    orthogonal,
) -> "tuple[int, ...] | None":
    """Lexicographically first assignment (0 preferred) with exactly one ray
    valued 1 per context and no two orthogonal rays both 1, or None."""
    in_ctx = [[] for _ in range(m)]
    for ci, ctx in enumerate(contexts):
        for i in ctx:
            in_ctx[i].append(ci)
    ctx_size = [len(c) for c in contexts]
    val = [-1] * m

    ones = [0] * len(contexts)
    unassigned = list(ctx_size)

    def set_value(i: int, v: int, trail: list) -> bool:
        """Assign with propagation; record changes on trail; False on conflict.

        Counter updates for an accepted assignment are applied in full before
        any conflict is reported, so ``undo`` is always an exact inverse."""
        stack = [(i, v)]
        while stack:
            i, v = stack.pop()
            if val[i] != -1:
                if val[i] != v:
                    return False
                continue
            val[i] = v
            trail.append(i)
            conflict = False
            if v == 1:
                for j in range(m):
                    if orthogonal(i, j):
                        if val[j] == 1:
                            conflict = True
                        elif val[j] == -1:
                            stack.append((j, 0))
            for ci in in_ctx[i]:
                unassigned[ci] -= 1
                ones[ci] += v
                if ones[ci] > 1:
                    conflict = True
                elif ones[ci] == 0:
                    if unassigned[ci] == 0:
                        conflict = True
                    elif unassigned[ci] == 1:
                        last = next(j for j in contexts[ci] if val[j] == -1)
                        stack.append((last, 1))
                elif v == 1:
                    for j in contexts[ci]:
                        if val[j] == -1:
                            stack.append((j, 0))
            if conflict:
                return False
        return True

    def undo(trail: list) -> None:
        for i in reversed(trail):
            v = val[i]
            val[i] = -1
            for ci in in_ctx[i]:
                unassigned[ci] += 1
                ones[ci] -= v

    def search(start: int) -> bool:
        i = start
        while i < m and val[i] != -1:
            i += 1
        if i == m:
            return True
        for v in (0, 1):
            trail: list = []
            if set_value(i, v, trail) and search(i + 1):
                return True
            undo(trail)
        return False

    return tuple(val) if search(0) else None


def find_assignment(
    rs: RaySet,
    tol: Tolerance = DEFAULT_TOL,
    restrict_to: "tuple[int, ...] | None" = None,
) -> "Assignment | NoAssignment":
    """Search for a noncontextual assignment. With ``restrict_to`` (context
    indices), only those contexts and the rays occurring in them constrain the
    search; used to re-verify unsatisfiable cores."""
    if rs.dim < 2:
        raise ValueError("assignment search requires dim >= 2")
    for ctx in rs.contexts:
        g = np.array([[rs.rays[i].inner(rs.rays[j]) for j in ctx] for i in ctx])
        if np.abs(g - np.eye(len(ctx))).max() > tol.eps * rs.dim:
            raise MalformedContext(f"context {ctx} is not orthonormal within eps")

    if restrict_to is None:
        contexts = rs.contexts
        active = range(len(rs.rays))
        orthogonal = rs.orthogonal
    else:
        contexts = tuple(rs.contexts[ci] for ci in restrict_to)
        live = sorted({i for ctx in contexts for i in ctx})
        active = live
        live_set = set(live)

        def orthogonal(i: int, j: int) -> bool:
            return i in live_set and j in live_set and rs.orthogonal(i, j)

    m = len(rs.rays)
    sol = _solve_coloring(m, contexts, orthogonal)
    if sol is not None:
        if restrict_to is not None:
            # rays outside the restriction carry no constraints; report 0
            sol = tuple(v if i in set(active) else 0 for i, v in enumerate(sol))
        return Assignment(values=tuple(max(v, 0) for v in sol))

    if restrict_to is not None:
        return NoAssignment(witness=tuple(restrict_to))

    # deletion-minimal unsatisfiable core over contexts
    core = list(range(len(rs.contexts)))
    for ci in list(core):
        trial = [c for c in core if c != ci]
        sub = tuple(rs.contexts[c] for c in trial)
        live = {i for ctx in sub for i in ctx}

        def orth(i: int, j: int, _live=live) -> bool:
            return i in _live and j in _live and rs.orthogonal(i, j)

        if _solve_coloring(m, sub, orth) is None:
            core = trial
    return NoAssignment(witness=tuple(core))


@dataclass(frozen=True)
class Satisfiable:
    """The table is a convex mixture of deterministic local strategies."""

    weights: tuple[float, ...]


@dataclass(frozen=True)
class Unsatisfiable:
    """No local model: minimal L1 residual over all mixtures is positive."""

    residual: float


def _local_strategies(rs: RaySet, cap: int = 4096) -> list[tuple[int, ...]]:
    """All noncontextual assignments of the ray set, each mapped to its
    per-context outcome (index of the ray valued 1 within each context)."""
    m = len(rs.rays)
    out: list[tuple[int, ...]] = []

    def rec(vals: list) -> None:
        if len(out) > cap:
            raise ValueError("too many deterministic strategies to enumerate")
        i = next((k for k, v in enumerate(vals) if v == -1), None)
        if i is None:
            outcome = []
            for ctx in rs.contexts:
                ones = [k for k, ray in enumerate(ctx) if vals[ray] == 1]
                if len(ones) != 1:
                    return
                outcome.append(ones[0])
            out.append(tuple(outcome))
            return
        for v in (0, 1):
            if v == 1 and any(vals[j] == 1 and rs.orthogonal(i, j) for j in range(m)):
                continue
            vals[i] = v
            rec(vals)
            vals[i] = -1

    rec([-1] * m)
    return sorted(set(out))


def local_map_search(
    rs_a: RaySet,
    rs_b: RaySet,
    table: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> "Satisfiable | Unsatisfiable":
    """Decide whether the correlation table (settings x settings x outcomes x
    outcomes) is a convex mixture of deterministic local assignment pairs.
    Linear feasibility over the enumerated strategy vertices."""
    na, nb = len(rs_a.contexts), len(rs_b.contexts)
    if na == 0 or nb == 0:
        raise ValueError("each side needs at least one complete context")
    if na > 4 or nb > 4:
        raise ValueError("local map search is limited to <= 4 settings per side")
    table = np.asarray(table, dtype=float)
    expect = (na, nb, rs_a.dim, rs_b.dim)
    if table.shape != expect:
        raise TableShapeMismatch(f"table shape {table.shape}, expected {expect}")

    strat_a = _local_strategies(rs_a)
    strat_b = _local_strategies(rs_b)
    if not strat_a or not strat_b:
        return Unsatisfiable(residual=float(np.abs(table).sum()))
    cols = []
    for sa in strat_a:
        for sb in strat_b:
            v = np.zeros(expect)
            for x in range(na):
                for y in range(nb):
                    v[x, y, sa[x], sb[y]] = 1.0
            cols.append(v.ravel())
    a_eq = np.column_stack(cols)
    b_eq = table.ravel()
    nvar = a_eq.shape[1]
    a_full = np.vstack([a_eq, np.ones((1, nvar))])
    b_full = np.concatenate([b_eq, [1.0]])
    res = linprog(np.zeros(nvar), A_eq=a_full, b_eq=b_full,
                  bounds=[(0, None)] * nvar, method="highs")
    if res.status == 0:
        weights = np.maximum(res.x, 0.0)
        return Satisfiable(weights=tuple(float(w) for w in weights))
    # measure the infeasibility: minimal L1 residual with slack variables
    nrow = a_full.shape[0]
    a_slack = np.hstack([a_full, np.eye(nrow), -np.eye(nrow)])
    cost = np.concatenate([np.zeros(nvar), np.ones(2 * nrow)])
    res2 = linprog(cost, A_eq=a_slack, b_eq=b_full,
                   bounds=[(0, None)] * (nvar + 2 * nrow), method="highs")
    residual = float(res2.fun) if res2.status == 0 else float("inf")
    return Unsatisfiable(residual=residual)


@dataclass(frozen=True)
class ChshSetting:
    """Two measurement angles per side, radians, x-z plane."""

    alice_angles: tuple[float, float]
    bob_angles: tuple[float, float]

    def __post_init__(self) -> None:
        angles = tuple(self.alice_angles) + tuple(self.bob_angles)
        if len(angles) != 4 or not all(np.isfinite(a) for a in angles):
            raise ValueError("need four finite angles")
        object.__setattr__(self, "alice_angles", tuple(float(a) for a in self.alice_angles))
        object.__setattr__(self, "bob_angles", tuple(float(a) for a in self.bob_angles))

    @classmethod
    def optimal(cls) -> "ChshSetting":
        """Angles maximizing the CHSH combination for the singlet under this
        sign convention (value 2*sqrt(2))."""
        return cls(alice_angles=(0.0, np.pi / 2), bob_angles=(np.pi / 4, -np.pi / 4))


def spin_observable(theta: float) -> Operator:
    """Spin measurement along angle theta in the x-z plane: cos(t) Z + sin(t) X."""
    c, s = np.cos(theta), np.sin(theta)
    return Operator(np.array([[c, s], [s, -c]], dtype=complex))


def measurement_rays(theta: float) -> tuple[ComplexVector, ComplexVector]:
    """Eigenrays (+1, -1) of the x-z plane spin observable at angle theta."""
    h = theta / 2.0
    plus = np.array([np.cos(h), np.sin(h)], dtype=complex)
    minus = np.array([-np.sin(h), np.cos(h)], dtype=complex)
    return (ComplexVector(canonical_phase(plus)), ComplexVector(canonical_phase(minus)))


def singlet() -> ComplexVector:
    v = np.zeros(4, dtype=complex)
    v[1], v[2] = 1.0, -1.0
    return ComplexVector(v / np.sqrt(2.0))


def correlator(state: ComplexVector, theta_a: float, theta_b: float) -> float:
    """Born-rule two-qubit correlator E(a, b)."""
    if state.dim != 4:
        raise DimMismatch(f"state dim {state.dim}, expected 4 (two qubits)")
    ab = np.kron(spin_observable(theta_a).entries, spin_observable(theta_b).entries)
    return float(np.real(np.vdot(state.amplitudes, ab @ state.amplitudes)))


def chsh_value(state: ComplexVector, setting: ChshSetting) -> float:
    """|E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2)|."""
    a1, a2 = setting.alice_angles
    b1, b2 = setting.bob_angles
    return abs(
        correlator(state, a1, b1)
        + correlator(state, a1, b2)
        + correlator(state, a2, b1)
        - correlator(state, a2, b2)
    )


def chsh_lhv_bound() -> float:
    """Classical bound by brute force over the 16 deterministic strategies."""
    best = 0.0
    for bits in itertools.product((1, -1), repeat=4):
        a1, a2, b1, b2 = bits
        best = max(best, abs(a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2))
    return float(best)


def correlation_table(state: ComplexVector, setting: ChshSetting) -> np.ndarray:
    """Born-rule outcome table p(a, b | x, y) for the four angle pairs."""
    if state.dim != 4:
        raise DimMismatch(f"state dim {state.dim}, expected 4 (two qubits)")
    table = np.zeros((2, 2, 2, 2))
    for x, ta in enumerate(setting.alice_angles):
        for y, tb in enumerate(setting.bob_angles):
            for a, ra in enumerate(measurement_rays(ta)):
                for b, rb in enumerate(measurement_rays(tb)):
                    amp = np.vdot(np.kron(ra.amplitudes, rb.amplitudes), state.amplitudes)
                    table[x, y, a, b] = float(np.abs(amp) ** 2)
    return table


def setting_ray_sets(setting: ChshSetting) -> tuple[RaySet, RaySet]:
    """Per-side ray sets whose derived contexts are the two measurement bases,
    ordered to match the correlation table axes."""
    ra = [r for t in setting.alice_angles for r in measurement_rays(t)]
    rb = [r for t in setting.bob_angles for r in measurement_rays(t)]
    rs_a, rs_b = RaySet.from_vectors(ra), RaySet.from_vectors(rb)
    return rs_a, rs_b
