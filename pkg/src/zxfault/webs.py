"""Pauli webs, detecting regions, signs and web-based fault detectability.

A web assigns each edge a highlight in {none, green, red, both}; highlights
are stored in the edge's a-side view and swap green<->red across a hadamard
edge.  The defining per-spider rules are encoded as one GF(2) linear system:

* variables: two bits (green, red) per edge plus one indicator bit per spider
  (the all-or-none choice for 0/pi spiders, the branch selector for +-pi/2);
* a 0/pi spider has an even number of own-colour legs, and its opposite-colour
  legs are all-or-none (tied to the indicator);
* a +-pi/2 spider has own-colour parity equal to the indicator and all its
  opposite-colour legs equal to the indicator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gf2
from .diagram import ZxDiagram
from .pauli import PauliString

HIGHLIGHT_LETTER = {(0, 0): "I", (1, 0): "Z", (0, 1): "X", (1, 1): "Y"}


@dataclass(frozen=True)
class PauliWeb:
    """highlight: edge-id -> one of "green", "red", "both" (absent = none),
    in the edge's a-side view; indicators: spider-id -> 0/1."""

    highlight: tuple  # sorted tuple of (edge_id, "green"|"red"|"both")
    indicators: tuple  # sorted tuple of (spider_id, bit)

    @property
    def edges(self) -> dict:
        return dict(self.highlight)

    @property
    def spider_indicator(self) -> dict:
        return dict(self.indicators)

    def letter(self, eid) -> str:
        h = self.edges.get(eid)
        return {"green": "Z", "red": "X", "both": "Y", None: "I"}[h]

    def pauli(self) -> PauliString:
        return PauliString({e: self.letter(e) for e, _ in self.highlight})

    def is_empty(self) -> bool:
        return not self.highlight


@dataclass(frozen=True)
class DetectingRegion:
    web: PauliWeb
    detecting_set: frozenset
    expected_parity: int


def _edge_var_index(edge_order: dict, eid: int, colour_bit: int) -> int:
    return 2 * edge_order[eid] + colour_bit  # 0 = green, 1 = red


def _build_system(d: ZxDiagram) -> tuple[np.ndarray, dict, dict]:
    """Rows of the homogeneous GF(2) system plus variable index maps."""
    edge_order = {eid: i for i, eid in enumerate(sorted(d.edges))}
    spider_order = {sid: i for i, sid in enumerate(sorted(d.spiders))}
    n_vars = 2 * len(edge_order) + len(spider_order)
    rows: list[np.ndarray] = []
    inc = d.incidence()
    for sid in sorted(d.spiders):
        s = d.spiders[sid]
        own_is_green = s.colour == "Z"
        o_idx = 2 * len(edge_order) + spider_order[sid]

        def view_bits(eid: int, ep: tuple) -> tuple[int, int]:
            """(own_var, opp_var) column indices for this leg's view."""
            e = d.edges[eid]
            swapped = e.had and ep == e.b  # b-side view swaps on hadamard edges
            green_var = _edge_var_index(edge_order, eid, 0)
            red_var = _edge_var_index(edge_order, eid, 1)
            g, r = (red_var, green_var) if swapped else (green_var, red_var)
            return (g, r) if own_is_green else (r, g)

        own_row = np.zeros(n_vars, dtype=np.uint8)
        for eid, ep in inc[sid]:
            own_var, opp_var = view_bits(eid, ep)
            own_row[own_var] ^= 1
            leg_row = np.zeros(n_vars, dtype=np.uint8)
            leg_row[opp_var] ^= 1
            leg_row[o_idx] ^= 1
            rows.append(leg_row)  # opp bit == indicator, for every leg
        if s.phase.is_pauli():
            rows.append(own_row)  # even own-colour legs
        else:
            own_row[o_idx] ^= 1
            rows.append(own_row)  # own parity == indicator
    if not rows:
        rows = [np.zeros(n_vars, dtype=np.uint8)]
    return np.array(rows, dtype=np.uint8), edge_order, spider_order


def _vector_to_web(d: ZxDiagram, v: np.ndarray, edge_order: dict, spider_order: dict) -> PauliWeb:
    hl = []
    for eid, i in edge_order.items():
        g, r = int(v[2 * i]), int(v[2 * i + 1])
        if (g, r) != (0, 0):
            hl.append((eid, {(1, 0): "green", (0, 1): "red", (1, 1): "both"}[(g, r)]))
    ind = [(sid, int(v[2 * len(edge_order) + j])) for sid, j in spider_order.items()]
    return PauliWeb(tuple(sorted(hl)), tuple(sorted(ind)))


def check_web(d: ZxDiagram, w: PauliWeb) -> bool:
    """Direct (non-linear-algebra) check of the defining per-spider rules."""
    inc = d.incidence()
    for sid, s in d.spiders.items():
        own_is_green = s.colour == "Z"
        own = opp = 0
        opp_bits = []
        for eid, ep in inc[sid]:
            e = d.edges[eid]
            h = w.edges.get(eid)
            g = h in ("green", "both")
            r = h in ("red", "both")
            if e.had and ep == e.b:
                g, r = r, g
            ob = g if own_is_green else r
            pb = r if own_is_green else g
            own += ob
            opp += pb
            opp_bits.append(pb)
        all_or_none = all(opp_bits) or not any(opp_bits)
        if s.phase.is_pauli():
            if own % 2 != 0 or not all_or_none:
                return False
        else:
            if opp_bits and not all_or_none:
                return False
            fired = bool(opp_bits and all(opp_bits))
            if own % 2 != (1 if fired else 0):
                return False
    return True


def web_basis(d: ZxDiagram) -> list[PauliWeb]:
    a, edge_order, spider_order = _build_system(d)
    ns = gf2.nullspace(a)
    webs = [_vector_to_web(d, v, edge_order, spider_order) for v in ns]
    return [w for w in webs if check_web(d, w)]


def local_sign(colour: str, qturns: int, both_legs: int) -> int:
    """Sign with which a fired web (all legs opposite-highlighted) stabilises
    a spider: (-1)^((k - y)/2) for a green spider and (-1)^((k + y)/2) for a
    red one, with k the effective quarter-turns and y the number of legs
    highlighted in both colours (conjugation by H flips the sign of Y, hence
    the colour asymmetry).  Derived from single-spider oracle runs."""
    diff = (qturns - both_legs) % 4 if colour == "Z" else (qturns + both_legs) % 4
    if diff % 2:
        raise ValueError("invalid web: qturns and both-colour legs must share parity")
    return -1 if diff == 2 else 1


def region_sign(d: ZxDiagram, w: PauliWeb) -> tuple[int, frozenset]:
    """(expected_parity, detecting_set) of a detecting region.

    expected_parity = (n_const + m) mod 2 where n_const counts spiders that
    the region stabilises with sign -1 at the all-zero outcome assignment and
    m counts both-colour plain edges; the detecting set collects the outcome
    variables whose flip toggles the sign.
    """
    for eid in d.boundary_edges():
        if eid in w.edges:
            raise ValueError("web touches boundary; not a detecting region")
    inc = d.incidence()
    n_const = 0
    det: set = set()
    for sid, s in d.spiders.items():
        legs = inc[sid]
        if not legs:
            continue
        # fired iff all legs are opposite-colour highlighted
        own_is_green = s.colour == "Z"
        def opp_bit(eid: int, ep: tuple) -> bool:
            e = d.edges[eid]
            h = w.edges.get(eid)
            g = h in ("green", "both")
            r = h in ("red", "both")
            if e.had and ep == e.b:
                g, r = r, g
            return r if own_is_green else g
        if not all(opp_bit(eid, ep) for eid, ep in legs):
            continue
        y = sum(1 for eid, _ in legs if w.edges.get(eid) == "both")
        if local_sign(s.colour, s.phase.qturns, y) == -1:
            n_const += 1
        det ^= set(s.phase.pivars)
    m = sum(1 for eid, h in w.highlight
            if h == "both" and not d.edges[eid].had)
    return (n_const + m) % 2, frozenset(det)


def detecting_region_basis(d: ZxDiagram) -> list[DetectingRegion]:
    a, edge_order, spider_order = _build_system(d)
    extra = []
    n_vars = a.shape[1]
    for eid in sorted(d.boundary_edges()):
        for bit in (0, 1):
            row = np.zeros(n_vars, dtype=np.uint8)
            row[_edge_var_index(edge_order, eid, bit)] = 1
            extra.append(row)
    if extra:
        a = np.concatenate([a, np.array(extra, dtype=np.uint8)], axis=0)
    ns = gf2.nullspace(a)
    regions = []
    for v in ns:
        w = _vector_to_web(d, v, edge_order, spider_order)
        if w.is_empty():
            continue
        parity, det = region_sign(d, w)
        regions.append(DetectingRegion(w, det, parity))
    return regions


def anticommutes(w: PauliWeb, f: PauliString) -> bool:
    count = 0
    for eid, letter in f.entries.items():
        wl = w.letter(eid)
        if wl != "I" and wl != letter:
            count += 1
    return count % 2 == 1


def is_detectable(d: ZxDiagram, f: PauliString,
                  regions: list[DetectingRegion] | None = None) -> bool:
    """Fault detectable iff it anticommutes with some detecting region
    (checking a basis suffices: anticommutation is linear in the region)."""
    for eid in f.support:
        if eid not in d.edges:
            raise ValueError(f"fault on unknown edge {eid}")
        if d.edges[eid].ideal:
            raise ValueError(f"fault on ideal edge {eid}")
    if regions is None:
        regions = detecting_region_basis(d)
    return any(anticommutes(r.web, f) for r in regions)
