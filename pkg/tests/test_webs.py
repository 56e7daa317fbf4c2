import itertools

import numpy as np
import pytest

from zxfault import samples
from zxfault.diagram import ZxDiagram, apply_fault
from zxfault.oracle import evaluate
from zxfault.pauli import PauliString
from zxfault.webs import (DetectingRegion, PauliWeb, check_web,
                          detecting_region_basis, is_detectable, local_sign,
                          region_sign, web_basis)

HLS = [None, "green", "red", "both"]


def brute_force_webs(d: ZxDiagram) -> set:
    """All valid edge highlightings by direct 4^|E| enumeration."""
    eids = sorted(d.edges)
    valid = set()
    for combo in itertools.product(HLS, repeat=len(eids)):
        hl = tuple((e, h) for e, h in zip(eids, combo) if h is not None)
        if check_web(d, PauliWeb(hl, ())):
            valid.add(hl)
    return valid


def span_highlights(d: ZxDiagram, webs) -> set:
    """Edge-highlight set spanned by a web basis (GF(2) span, projected)."""
    eids = sorted(d.edges)
    idx = {e: i for i, e in enumerate(eids)}

    def vec(w):
        v = np.zeros(2 * len(eids), dtype=np.uint8)
        for e, h in w.highlight:
            if h in ("green", "both"):
                v[2 * idx[e]] = 1
            if h in ("red", "both"):
                v[2 * idx[e] + 1] = 1
        return v

    vecs = [vec(w) for w in webs]
    out = set()
    for mask in itertools.product((0, 1), repeat=len(vecs)):
        v = np.zeros(2 * len(eids), dtype=np.uint8)
        for bit, w in zip(mask, vecs):
            if bit:
                v ^= w
        hl = []
        for e in eids:
            g, r = v[2 * idx[e]], v[2 * idx[e] + 1]
            if (g, r) != (0, 0):
                hl.append((e, {(1, 0): "green", (0, 1): "red", (1, 1): "both"}[(g, r)]))
        out.add(tuple(hl))
    return out


@pytest.mark.parametrize("name,d", samples.web_corpus(), ids=[n for n, _ in samples.web_corpus()])
def test_web_basis_matches_brute_force(name, d):
    assert len(d.edges) <= 6
    basis = web_basis(d)
    for w in basis:
        assert check_web(d, w)
    assert span_highlights(d, basis) == brute_force_webs(d)


def test_corpus_size():
    assert len(samples.web_corpus()) == 20


def test_bare_wire_basis():
    basis = web_basis(samples.wire())
    highlights = {w.highlight for w in basis}
    eid = list(samples.wire().edges)[0]
    assert highlights == {((0, "green"),), ((0, "red"),)} or len(basis) == 2


def test_three_leg_green_basis_size():
    d = samples.spider_tree("Z", 0, 3)
    assert len(web_basis(d)) == 3


def test_two_zz_has_one_region():
    d = samples.two_zz_measurements()
    regions = detecting_region_basis(d)
    assert len(regions) == 1
    r = regions[0]
    assert r.detecting_set == frozenset({"k1", "k2"})
    assert r.expected_parity == 0


def test_two_zz_with_x_pi_flips_parity():
    d = samples.two_zz_measurements()
    # insert an X pi spider on qubit 0's mid edge (between the two wire spiders)
    mid = [eid for eid, e in d.edges.items()
           if e.a == ("s", 2) and e.b == ("s", 3)][0]
    d2 = apply_fault(d, PauliString({mid: "X"}))
    regions = detecting_region_basis(d2)
    assert len(regions) == 1
    assert regions[0].detecting_set == frozenset({"k1", "k2"})
    assert regions[0].expected_parity == 1


def test_wire_has_no_regions():
    assert detecting_region_basis(samples.wire()) == []


def test_region_sign_rejects_boundary_web():
    d = samples.wire()
    w = PauliWeb(((0, "green"),), ())
    with pytest.raises(ValueError, match="boundary"):
        region_sign(d, w)


def test_detectability_two_zz():
    d = samples.two_zz_measurements()
    mid = [eid for eid, e in d.edges.items()
           if e.a == ("s", 2) and e.b == ("s", 3)][0]
    assert is_detectable(d, PauliString({mid: "X"}))
    assert not is_detectable(d, PauliString({mid: "Z"}))
    assert not is_detectable(d, PauliString())


def test_detectability_rejects_ideal_edge():
    d = samples.two_zz_measurements(ideal_internal=True)
    hub_edge = [eid for eid, e in d.edges.items() if e.ideal][0]
    with pytest.raises(ValueError, match="ideal"):
        is_detectable(d, PauliString({hub_edge: "X"}))


def _assignment_parity_ok(d, region, assignment_map):
    par = sum(assignment_map[v] for v in region.detecting_set) % 2
    return par == region.expected_parity


@pytest.mark.parametrize("name,d", samples.web_corpus(), ids=[n for n, _ in samples.web_corpus()])
def test_region_sign_soundness_vs_oracle(name, d):
    """Assignments violating a region's expected parity give the zero tensor."""
    t = evaluate(d)
    m = t.max_abs()
    for region in detecting_region_basis(d):
        if not region.detecting_set and region.expected_parity == 1:
            # an unconditional -1 region forces the whole family to zero
            assert m <= 1e-9, f"{name}: parity-1 empty-set region but tensor nonzero"
            continue
        for b in t.assignments():
            am = dict(zip(d.variables, b))
            if not _assignment_parity_ok(d, region, am):
                assert np.max(np.abs(t[b])) <= 1e-9 * max(m, 1.0), \
                    f"{name}: assignment {b} violates region parity but tensor nonzero"


def test_local_sign_against_oracle():
    """Re-derive the frozen local sign rule from single-spider evaluations."""
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.diag([1, -1]).astype(complex)
    Y = np.array([[0, -1j], [1j, 0]])
    letters = {"X": X, "Y": Y, "Z": Z}
    for colour in ("Z", "X"):
        for qt in range(4):
            for deg in (1, 2, 3, 4):
                d = samples.spider_tree(colour, qt, deg)
                v = evaluate(d)[()].reshape(-1)
                own_letter = "Z" if colour == "Z" else "X"
                opp_letter = "X" if colour == "Z" else "Z"
                for own_mask in itertools.product((0, 1), repeat=deg):
                    # fired web: all legs opposite-highlighted
                    if sum(own_mask) % 2 != qt % 2:
                        continue  # invalid web
                    ops = [letters["Y"] if b else letters[opp_letter] for b in own_mask]
                    p = ops[0]
                    for op in ops[1:]:
                        p = np.kron(p, op)
                    pv = p @ v
                    expected = local_sign(colour, qt, sum(own_mask))
                    assert np.allclose(pv, expected * v), \
                        (colour, qt, deg, own_mask)


def test_detectability_linear_in_region():
    """Anticommuting with some element of the span == with some basis element."""
    d = samples.two_zz_measurements()
    regions = detecting_region_basis(d)
    for eid in d.non_ideal_edges():
        for letter in "XYZ":
            f = PauliString({eid: letter})
            via_basis = is_detectable(d, f, regions)
            # enumerate the whole span
            from zxfault.webs import anticommutes
            hit = False
            for mask in itertools.product((0, 1), repeat=len(regions)):
                hl: dict = {}
                for bit, r in zip(mask, regions):
                    if not bit:
                        continue
                    for e, h in r.web.highlight:
                        g = h in ("green", "both")
                        red = h in ("red", "both")
                        og, orr = hl.get(e, (0, 0))
                        hl[e] = (og ^ g, orr ^ red)
                web = PauliWeb(tuple(sorted(
                    (e, {(1, 0): "green", (0, 1): "red", (1, 1): "both"}[gr])
                    for e, gr in hl.items() if gr != (0, 0))), ())
                if anticommutes(web, f):
                    hit = True
            assert via_basis == hit
