"""Fault triviality, fault correspondence search, w-fault-equivalence
verdicts and circuit distance.

Two noisy diagrams are w-fault-equivalent when every fault of weight below w
on either side is detectable there, or is matched by a fault of no greater
weight on the other side whose faulted diagram is equal (up to a global
magnitude and per-outcome phase, under the outcome correspondence).  Everything here is brute force
against the tensor oracle; detectability uses the exact web criterion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .diagram import ZxDiagram, apply_fault
from .noise import ABOVE_CAP, NoiseModel, enumerate_faults
from .oracle import (DEFAULT_BUDGET, OutcomeMap, OutcomeTensor,
                     equal_up_to_scalar, evaluate)
from .pauli import PauliString
from .webs import detecting_region_basis, is_detectable


@dataclass
class Side:
    diagram: ZxDiagram
    noise: NoiseModel


@dataclass
class EquivalenceSpec:
    """side_a is the implementation, side_b the specification it is compared
    against; the correspondence maps each side-b outcome variable to an XOR
    expression in side-a variables (i.e. OutcomeMap source = side-a registry,
    target = side-b registry).  None means identity on a shared registry."""

    side_a: Side
    side_b: Side
    correspondence: OutcomeMap | None
    w: int
    budget: int = DEFAULT_BUDGET

    def corr(self) -> OutcomeMap:
        if self.correspondence is None:
            return OutcomeMap.identity(self.side_a.diagram.variables)
        return self.correspondence

    def swapped(self) -> "EquivalenceSpec":
        return EquivalenceSpec(self.side_b, self.side_a,
                               self.corr().inverted(), self.w, self.budget)


@dataclass(frozen=True)
class Counterexample:
    side: str  # "a" | "b"
    fault: PauliString
    weight: int
    reason: str  # "no-match-found" | "match-heavier"


@dataclass
class Verdict:
    equivalent: bool
    counterexamples: list = field(default_factory=list)
    checked: int = 0

    def to_json(self) -> dict:
        return {"equivalent": self.equivalent,
                "checked": self.checked,
                "counterexamples": [
                    {"side": c.side, "fault": c.fault.to_text(),
                     "weight": c.weight, "reason": c.reason}
                    for c in self.counterexamples]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def is_trivial(d: ZxDiagram, f: PauliString, base: OutcomeTensor | None = None,
               budget: int = DEFAULT_BUDGET) -> bool:
    """True iff applying the fault leaves the diagram's tensor family
    unchanged up to one global scalar (identity correspondence)."""
    if base is None:
        base = evaluate(d, budget)
    return equal_up_to_scalar(base, evaluate(apply_fault(d, f), budget))


class _SideCache:
    """Per-side fault list (nondecreasing weight, lex within weight) and
    faulted-tensor cache."""

    def __init__(self, side: Side, max_weight: int, budget: int):
        self.side = side
        self.budget = budget
        self.faults = list(enumerate_faults(side.noise, max_weight))
        self._tensors: dict[PauliString, OutcomeTensor] = {}

    def tensor(self, f: PauliString) -> OutcomeTensor:
        if f not in self._tensors:
            self._tensors[f] = evaluate(apply_fault(self.side.diagram, f),
                                        self.budget)
        return self._tensors[f]


def _matches(spec: EquivalenceSpec, t_a: OutcomeTensor, t_b: OutcomeTensor) -> bool:
    return equal_up_to_scalar(t_b, t_a, spec.corr())


def find_equivalent_fault(spec: EquivalenceSpec, side: str, f: PauliString,
                          _caches: dict | None = None,
                          max_weight: int | None = None):
    """First fault on the other side, in nondecreasing weight then lex order,
    whose faulted diagram equals the faulted source diagram under the
    correspondence; None if none exists up to the weight of ``f`` (or the
    explicit ``max_weight``)."""
    if _caches is None:
        bound = f.weight() if max_weight is None else max_weight
        _caches = {"a": _SideCache(spec.side_a, bound, spec.budget),
                   "b": _SideCache(spec.side_b, bound, spec.budget)}
    if max_weight is None:
        max_weight = f.weight()
    other = "b" if side == "a" else "a"
    src = _caches[side].tensor(f)
    for g, w in _caches[other].faults:
        if w > max_weight:
            break
        cand = _caches[other].tensor(g)
        if side == "a":
            ok = _matches(spec, src, cand)
        else:
            ok = _matches(spec, cand, src)
        if ok:
            return g
    return None


def check_w_fault_equivalence(spec: EquivalenceSpec) -> Verdict:
    caches = {"a": _SideCache(spec.side_a, spec.w - 1, spec.budget),
              "b": _SideCache(spec.side_b, spec.w - 1, spec.budget)}
    regions = {s: detecting_region_basis(caches[s].side.diagram) for s in "ab"}
    counterexamples = []
    checked = 0
    for side in ("a", "b"):
        for f, w in caches[side].faults:
            checked += 1
            if f and is_detectable(caches[side].side.diagram, f, regions[side]):
                continue
            g = find_equivalent_fault(spec, side, f, _caches=caches)
            if g is not None:
                continue
            # distinguish "a heavier match exists within the enumerated range"
            heavier = find_equivalent_fault(spec, side, f, _caches=caches,
                                            max_weight=spec.w - 1)
            reason = "match-heavier" if heavier is not None else "no-match-found"
            counterexamples.append(Counterexample(side, f, w, reason))
    counterexamples.sort(key=lambda c: (c.weight, c.fault.sort_key(), c.side))
    return Verdict(not counterexamples, counterexamples, checked)


def circuit_distance(d: ZxDiagram, m: NoiseModel, cap: int,
                     budget: int = DEFAULT_BUDGET):
    """Minimum weight of a non-trivial undetectable fault; ABOVE_CAP if none
    of weight <= cap exists."""
    regions = detecting_region_basis(d)
    base = evaluate(d, budget)
    for f, w in enumerate_faults(m, cap):
        if not f:
            continue
        if is_detectable(d, f, regions):
            continue
        if not is_trivial(d, f, base, budget):
            return w
    return ABOVE_CAP


def idealised(d: ZxDiagram) -> ZxDiagram:
    """Copy of the diagram with every edge marked fault-free."""
    out = d.copy()
    for eid in out.edges:
        out.set_ideal(eid, True)
    return out
