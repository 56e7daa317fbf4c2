import pytest
from hypothesis import given, strategies as st

from zxfault.pauli import IDENTITY, PauliString


def P(text):
    return PauliString.from_text(text)


def test_mul_same_location():
    assert P("e1:X") * P("e1:Z") == P("e1:Y")
    assert P("e1:X") * P("e1:X") == IDENTITY
    assert P("e1:X") * P("e2:Z") == P("e1:X;e2:Z")


def test_commutes():
    assert not P("e1:X").commutes(P("e1:Z"))
    assert P("e1:X").commutes(P("e1:X"))
    assert P("e1:X;e2:X").commutes(P("e1:Z;e2:Z"))


def test_weight():
    assert IDENTITY.weight() == 0
    assert P("e2:X;e3:Y;e4:Z").weight() == 3
    assert P("e1:Y").weight() == 1


def test_text_round_trip():
    p = P("e1:X;e3:Z")
    assert p.to_text() == "e1:X;e3:Z"
    assert PauliString.from_text(p.to_text()) == p
    assert P("").to_text() == ""


def test_rejects_bad_letter():
    with pytest.raises(ValueError):
        PauliString({"e1": "Q"})


locs = st.sampled_from(["a", "b", "c", "d"])
letters = st.sampled_from(["X", "Y", "Z"])
paulis = st.dictionaries(locs, letters, max_size=4).map(PauliString)


@given(paulis, paulis, paulis)
def test_group_laws(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * a == IDENTITY


@given(paulis, paulis, paulis)
def test_commutation_bilinearity(a, b, c):
    assert a.commutes(b) == b.commutes(a)
    assert a.commutes(b * c) == (a.commutes(b) == a.commutes(c))


@given(paulis, paulis)
def test_weight_subadditive(a, b):
    assert (a * b).weight() <= a.weight() + b.weight()
