"""Exact dense-tensor evaluation of small diagrams.

Ground truth for equality up to a global scalar, fault triviality, and
totality.  Outcome variables are handled exactly: every variable becomes an
extra binary tensor leg (tied across its occurrences by a copy tensor), so one
contraction yields the full outcome-indexed family.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .diagram import ZxDiagram

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

DEFAULT_BUDGET = 2**22


class OracleBudgetError(Exception):
    pass


def _z_core(degree: int, qturns: int) -> np.ndarray:
    """Z-spider tensor: all-zeros entry 1, all-ones entry i**qturns."""
    if degree == 0:
        return np.array(1 + 1j**qturns, dtype=complex)
    t = np.zeros((2,) * degree, dtype=complex)
    t[(0,) * degree] = 1
    t[(1,) * degree] = 1j**qturns
    return t


def _apply_on_leg(t: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(t, mat.T, axes=([axis], [0]))
    return np.moveaxis(moved, -1, axis)


class _Node:
    __slots__ = ("tensor", "labels")

    def __init__(self, tensor: np.ndarray, labels: list):
        self.tensor = tensor
        self.labels = labels


def _contract_pair(a: _Node, b: _Node, budget: int) -> _Node:
    shared = [l for l in a.labels if l in b.labels]
    ax_a = [a.labels.index(l) for l in shared]
    ax_b = [b.labels.index(l) for l in shared]
    out_labels = [l for i, l in enumerate(a.labels) if i not in ax_a] + \
                 [l for i, l in enumerate(b.labels) if i not in ax_b]
    if 2 ** len(out_labels) > budget:
        raise OracleBudgetError(
            f"contraction intermediate of {len(out_labels)} open legs exceeds budget")
    t = np.tensordot(a.tensor, b.tensor, axes=(ax_a, ax_b))
    return _Node(t, out_labels)


def _dedup_legs(t: np.ndarray, labels: list) -> _Node:
    """Trace out repeated labels on a single tensor (self-loops)."""
    while True:
        seen: dict = {}
        dup = None
        for i, l in enumerate(labels):
            if l in seen:
                dup = (seen[l], i)
                break
            seen[l] = i
        if dup is None:
            return _Node(t, labels)
        i, j = dup
        t = np.trace(t, axis1=i, axis2=j)
        labels = [l for k, l in enumerate(labels) if k not in (i, j)]


class OutcomeTensor:
    """Outcome-indexed family of linear-map tensors.

    ``array`` has shape (2,)*len(variables) + (2**n_in, 2**n_out); the entry
    at (assignment, a, b) is <b| D |a> for that outcome assignment, up to one
    global scalar shared by the whole family.
    """

    def __init__(self, variables: list[str], n_in: int, n_out: int, array: np.ndarray):
        self.variables = list(variables)
        self.n_in = n_in
        self.n_out = n_out
        self.array = array

    def assignments(self):
        return itertools.product((0, 1), repeat=len(self.variables))

    def __getitem__(self, assignment) -> np.ndarray:
        return self.array[tuple(assignment)]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.array))) if self.array.size else 0.0


def _port_label(d: ZxDiagram, eid: int, port: tuple):
    """Open tensor label carrying the given boundary port of edge eid."""
    e = d.edges[eid]
    if any(ep[0] == "s" for ep in e.ends()):
        return ("e", eid)
    return ("e", eid) if e.a == port else ("e", eid, "b")


def evaluate(d: ZxDiagram, budget: int = DEFAULT_BUDGET) -> OutcomeTensor:
    """Contract the diagram into its outcome-indexed tensor family."""
    total_budget = budget * (2 ** len(d.variables))
    nodes: list[_Node] = []
    var_occurrences: dict[str, int] = {v: 0 for v in d.variables}

    for sid, s in sorted(d.spiders.items()):
        legs: list = []
        had_legs: list[int] = []
        for eid, e in sorted(d.edges.items()):
            a_is_spider = e.a[0] == "s"
            for side, ep in enumerate(e.ends()):
                if ep == ("s", sid):
                    legs.append(("e", eid))
                    # absorb the H of a hadamard edge exactly once, at the
                    # a-side endpoint if that is a spider, else here
                    if e.had and (side == 0 or not a_is_spider):
                        had_legs.append(len(legs) - 1)
        vlegs = sorted(s.phase.pivars)
        deg = len(legs)
        if 2 ** (deg + len(vlegs)) > total_budget:
            raise OracleBudgetError(f"spider {sid} tensor exceeds budget")
        if vlegs:
            sub = []
            for bits in itertools.product((0, 1), repeat=len(vlegs)):
                qt = (s.phase.qturns + 2 * sum(bits)) % 4
                sub.append(_z_core(deg, qt))
            t = np.stack(sub).reshape((2,) * len(vlegs) + (2,) * deg)
            t = np.moveaxis(t, list(range(len(vlegs))), list(range(deg, deg + len(vlegs))))
        else:
            t = _z_core(deg, s.phase.qturns)
        if s.colour == "X":
            for ax in range(deg):
                t = _apply_on_leg(t, H, ax)
        for ax in had_legs:
            t = _apply_on_leg(t, H, ax)
        labels = legs + [("v", v, var_occurrences[v]) for v in vlegs]
        for v in vlegs:
            var_occurrences[v] += 1
        nodes.append(_dedup_legs(t, labels))

    # bare wires (both endpoints are ports)
    for eid, e in sorted(d.edges.items()):
        if all(ep[0] != "s" for ep in e.ends()):
            t = H.copy() if e.had else np.eye(2, dtype=complex)
            nodes.append(_Node(t, [("e", eid), ("e", eid, "b")]))

    # copy tensor per variable ties its occurrences and exposes one open leg
    for v in d.variables:
        occ = var_occurrences[v]
        t = _z_core(occ + 1, 0)
        nodes.append(_Node(t, [("v", v, i) for i in range(occ)] + [("var", v)]))

    # greedy contraction: smallest node first, with its cheapest partner
    while len(nodes) > 1:
        nodes.sort(key=lambda n: (len(n.labels), [str(l) for l in n.labels]))
        a = nodes[0]
        partner = None
        best = None
        for other in nodes[1:]:
            shared = sum(1 for l in a.labels if l in other.labels)
            if shared:
                cost = len(a.labels) + len(other.labels) - 2 * shared
                if best is None or cost < best:
                    best, partner = cost, other
        if partner is None:
            partner = nodes[1]  # disconnected component: outer product
        nodes.remove(a)
        nodes.remove(partner)
        merged = _contract_pair(a, partner, total_budget)
        nodes.append(_dedup_legs(merged.tensor, merged.labels))

    final = nodes[0] if nodes else _Node(np.array(1, dtype=complex), [])

    in_labels = [_port_label(d, eid, ("b", "in", i)) for i, eid in enumerate(d.inputs)]
    out_labels = [_port_label(d, eid, ("b", "out", i)) for i, eid in enumerate(d.outputs)]
    wanted = [("var", v) for v in d.variables] + in_labels + out_labels
    if sorted(map(str, wanted)) != sorted(map(str, final.labels)):
        raise ValueError(f"contraction label mismatch: wanted {wanted}, got {final.labels}")
    perm = [final.labels.index(l) for l in wanted]
    t = np.transpose(final.tensor, perm)
    nv, ni, no = len(d.variables), len(d.inputs), len(d.outputs)
    t = t.reshape((2,) * nv + (2**ni, 2**no))
    return OutcomeTensor(d.variables, ni, no, t)


class OutcomeMap:
    """Affine GF(2) map from a source outcome registry to a target registry.

    Each target variable is an XOR of source variables plus a constant bit.
    ``rows`` maps target variable -> (frozenset of source vars, const).
    """

    def __init__(self, source_vars: list[str], target_vars: list[str],
                 rows: dict[str, tuple[frozenset, int]]):
        self.source_vars = list(source_vars)
        self.target_vars = list(target_vars)
        self.rows = {t: (frozenset(vs), c % 2) for t, (vs, c) in rows.items()}
        for t in target_vars:
            if t not in self.rows:
                raise ValueError(f"no expression for target variable {t!r}")
        for t, (vs, _) in self.rows.items():
            bad = vs - set(source_vars)
            if bad:
                raise ValueError(f"expression for {t!r} uses unknown variables {sorted(bad)}")

    @classmethod
    def identity(cls, variables: list[str]) -> "OutcomeMap":
        return cls(variables, variables, {v: (frozenset([v]), 0) for v in variables})

    def __call__(self, assignment: tuple) -> tuple:
        vals = dict(zip(self.source_vars, assignment))
        return tuple((sum(vals[v] for v in vs) + c) % 2
                     for t in self.target_vars
                     for vs, c in [self.rows[t]])

    def image(self) -> set[tuple]:
        return {self(a) for a in itertools.product((0, 1), repeat=len(self.source_vars))}

    @classmethod
    def parse(cls, source_vars: list[str], target_vars: list[str],
              exprs: dict[str, str]) -> "OutcomeMap":
        """Expressions like ``k1^k2^1`` or ``0``."""
        rows = {}
        for t, expr in exprs.items():
            vs, c = set(), 0
            for term in expr.split("^"):
                term = term.strip()
                if term in ("0", ""):
                    continue
                if term == "1":
                    c ^= 1
                else:
                    vs.symmetric_difference_update([term])
            rows[t] = (frozenset(vs), c)
        return cls(source_vars, target_vars, rows)

    def inverted(self) -> "OutcomeMap":
        """Inverse map; requires a bijection (square invertible linear part)."""
        from . import gf2
        n = len(self.source_vars)
        if len(self.target_vars) != n:
            raise ValueError("only square correspondences can be inverted")
        if n == 0:
            return OutcomeMap([], [], {})
        mat = np.zeros((n, n), dtype=np.uint8)
        const = np.zeros(n, dtype=np.uint8)
        src_idx = {v: j for j, v in enumerate(self.source_vars)}
        for i, t in enumerate(self.target_vars):
            vs, c = self.rows[t]
            const[i] = c
            for v in vs:
                mat[i, src_idx[v]] = 1
        cols = []
        for j in range(n):
            e = np.zeros(n, dtype=np.uint8)
            e[j] = 1
            x = gf2.solve(mat, e)
            if x is None:
                raise ValueError("correspondence is not invertible")
            cols.append(x)
        inv = np.stack(cols, axis=1)  # inv @ mat = I
        rows = {}
        for i, s in enumerate(self.source_vars):
            vs = frozenset(t for j, t in enumerate(self.target_vars) if inv[i, j])
            c = int(inv[i] @ const) % 2
            rows[s] = (vs, c)
        return OutcomeMap(self.target_vars, self.source_vars, rows)

    def to_exprs(self) -> dict[str, str]:
        out = {}
        for t in self.target_vars:
            vs, c = self.rows[t]
            parts = sorted(vs) + (["1"] if c else [])
            out[t] = "^".join(parts) if parts else "0"
        return out


def equal_up_to_scalar(t1: OutcomeTensor, t2: OutcomeTensor,
                       correspondence: OutcomeMap | None = None,
                       tol: float = 1e-9) -> bool:
    """True iff scalars c_b of one common magnitude satisfy
    t2[b] = c_b*t1[corr(b)] for every assignment b, and every t1 assignment
    outside the correspondence image is the zero tensor.

    The magnitude is global across the family, so outcome probabilities must
    agree exactly; the phase may vary with the assignment, because commuting a
    Pauli past an outcome spider produces outcome-dependent signs (closed
    scalar sub-diagrams such as (-1)^k), which diagram equality quotients out.
    Tensors are compared after normalising each family to unit max-magnitude."""
    if (t1.n_in, t1.n_out) != (t2.n_in, t2.n_out):
        raise ValueError("incompatible shapes")
    if correspondence is None:
        if t1.variables != t2.variables:
            raise ValueError("different registries need an explicit correspondence")
        correspondence = OutcomeMap.identity(t1.variables)
    else:
        if correspondence.source_vars != t2.variables or \
           correspondence.target_vars != t1.variables:
            raise ValueError("correspondence registries do not match the tensors")

    m1, m2 = t1.max_abs(), t2.max_abs()
    if m1 < tol and m2 < tol:
        return True  # two zero families
    if m1 < tol or m2 < tol:
        return False
    a1 = t1.array / m1
    a2 = t2.array / m2

    # every nonzero branch of t2 must be a scalar multiple of t1 at its image,
    # all scalars sharing one magnitude; zero branches are impossible outcomes
    # and impose nothing by themselves, but every nonzero t1 assignment must
    # be hit by some nonzero branch.
    mag = None
    hit: set[tuple] = set()
    for b in t2.assignments():
        tb = a2[b]
        if tb.size == 0 or np.max(np.abs(tb)) <= tol:
            continue
        target = correspondence(b)
        hit.add(target)
        ta = a1[target]
        idx = np.unravel_index(np.argmax(np.abs(tb)), tb.shape)
        if abs(ta[idx]) <= tol:
            return False
        c = tb[idx] / ta[idx]
        if not np.allclose(tb, c * ta, atol=tol, rtol=0):
            return False
        if mag is None:
            mag = abs(c)
        elif abs(abs(c) - mag) > tol:
            return False
    if mag is None:
        return False  # t2 entirely zero but t1 nonzero somewhere (m1 >= tol)
    for a in t1.assignments():
        if a not in hit and np.max(np.abs(a1[a])) > tol:
            return False
    return True


def is_total(d: ZxDiagram, budget: int = DEFAULT_BUDGET, tol: float = 1e-9) -> bool:
    """Tensor nonzero exactly on constraint-satisfying outcome assignments."""
    t = evaluate(d, budget)
    m = t.max_abs()
    if m == 0.0:
        return not _any_assignment_satisfies(d)
    arr = t.array / m
    for b in t.assignments():
        vals = dict(zip(d.variables, b))
        sat = all(sum(vals[v] for v in vs) % 2 == rhs for vs, rhs in d.constraints)
        nz = bool(np.max(np.abs(arr[b])) > tol)
        if nz != sat:
            return False
    return True


def _any_assignment_satisfies(d: ZxDiagram) -> bool:
    for b in itertools.product((0, 1), repeat=len(d.variables)):
        vals = dict(zip(d.variables, b))
        if all(sum(vals[v] for v in vs) % 2 == rhs for vs, rhs in d.constraints):
            return True
    return False
