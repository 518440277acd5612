import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chernsimons.cyclo import Level, omega_power
from chernsimons.stabilizer import (
    NotStabilizerError,
    PauliOp,
    StabilizerTableau,
    ZeroStateError,
    affine_quadratic_form,
    dense_from_tableau,
    entropy_from_tableau,
    is_stabilizer,
    parse_pauli,
    pauli_matrix,
    stabilizer_group_search,
    stabilizes,
    tableau_from_state,
    weyl_apply,
    wigner_function,
    wigner_is_stabilizer,
)
from chernsimons.states import apply_gate, basis_state, fusion_state, modular_gate, state_from_ints, tensor_product
from chernsimons.cyclo import CycArray

from conftest import corpus, entropy_oracle_dits, hopf_state, word_states


def group_elements(t: StabilizerTableau) -> set[PauliOp]:
    k = t.level.k
    out = set()
    for ms in itertools.product(range(k), repeat=t.n):
        g = PauliOp.identity(t.level, t.n)
        for gen, m in zip(t.generators, ms):
            g = g * gen**m
        out.add(g)
    return out


def quadratic_phase_state(level, a):
    j = np.arange(level.k)
    return [omega_power(level, int(a * x * x)) for x in j]


# Weyl operators -----------------------------------------------------------------

def test_z_on_basis_k3():
    L = Level(3)
    out = weyl_apply(PauliOp(L, (1,), (0,)), basis_state(L, [1]))
    assert out.amplitude(1) == omega_power(L, 1)


@pytest.mark.parametrize("k", [3, 5])
def test_x_has_order_k(k):
    L = Level(k)
    rng = np.random.default_rng(k)
    s = state_from_ints(L, rng.integers(-3, 4, size=(k, k)))
    x = PauliOp(L, (0, 0), (1, 0))
    cur = s
    for _ in range(k):
        cur = weyl_apply(x, cur)
    assert cur.amps.equals(s.amps)
    assert (x**k) == PauliOp.identity(L, 2)


def test_weyl_product_rule_against_matrices():
    L = Level(5)
    rng = np.random.default_rng(1)
    for _ in range(50):
        p = PauliOp(L, tuple(rng.integers(5, size=2)), tuple(rng.integers(5, size=2)), int(rng.integers(5)))
        q = PauliOp(L, tuple(rng.integers(5, size=2)), tuple(rng.integers(5, size=2)), int(rng.integers(5)))
        assert np.allclose(pauli_matrix(p) @ pauli_matrix(q), pauli_matrix(p * q), atol=1e-10)


def test_weyl_apply_matches_matrix():
    L = Level(3)
    rng = np.random.default_rng(2)
    s = state_from_ints(L, rng.integers(-2, 3, size=(3, 3)))
    for _ in range(20):
        p = PauliOp(L, tuple(rng.integers(3, size=2)), tuple(rng.integers(3, size=2)), int(rng.integers(3)))
        got = weyl_apply(p, s).to_complex().reshape(-1)
        assert np.allclose(got, pauli_matrix(p) @ s.to_complex().reshape(-1))


def test_weyl_operators_have_order_k():
    L = Level(7)
    p = PauliOp(L, (3, 1), (2, 5), 4)
    assert p**7 == PauliOp.identity(L, 2)


def test_pauli_text_round_trip():
    L = Level(5)
    p = PauliOp(L, (1, -1), (0, 2), 3)
    assert p.to_text() == "w^3 Z[1,4] X[0,2]"
    assert parse_pauli(L, p.to_text()) == p
    with pytest.raises(ValueError):
        parse_pauli(L, "Z[1] X[0]")


def test_size_mismatch():
    L = Level(3)
    with pytest.raises(ValueError):
        weyl_apply(PauliOp(L, (0,), (1,)), basis_state(L, [0, 0]))


# Wigner function ----------------------------------------------------------------

def test_wigner_basis_state_k3():
    w = wigner_function(basis_state(Level(3), [0]))
    v = w.values
    assert v.min() >= -1e-12
    nz = v[np.abs(v) > 1e-9]
    assert len(nz) == 3 and np.allclose(nz, 1 / 3)


def test_wigner_negative_for_superposition_k3():
    L = Level(3)
    s = state_from_ints(L, [1, 1, 0])
    assert wigner_function(s).min < -1e-3


def test_wigner_quadratic_phase_k5():
    L = Level(5)
    s = state_from_ints(L, [0] * 5)
    s = type(s)(L, s.sites, CycArray.stack(quadratic_phase_state(L, -1)))
    v = wigner_function(s).values
    assert np.all((np.abs(v) < 1e-9) | (np.abs(v - 0.2) < 1e-9))


def test_wigner_sums_to_one(level):
    rng = np.random.default_rng(level.k)
    s = state_from_ints(level, rng.integers(-3, 4, size=(level.k, level.k)))
    assert abs(wigner_function(s).values.sum() - 1) < 1e-9


def test_wigner_zero_state_error():
    with pytest.raises(ZeroStateError):
        wigner_function(state_from_ints(Level(3), [0, 0, 0]))


def test_wigner_of_stabilizer_states_is_flat(level):
    for s in corpus(level):
        v = wigner_function(s).values
        target = level.k ** (-s.n)
        assert np.all((np.abs(v) < 1e-9) | (np.abs(v - target) < 1e-9))
        assert np.count_nonzero(np.abs(v) > 1e-9) == level.k**s.n


# stabilizer test -----------------------------------------------------------------

def test_is_stabilizer_examples():
    L3, L5 = Level(3), Level(5)
    assert is_stabilizer(fusion_state(L3))
    plus = apply_gate(modular_gate(L3, "S"), basis_state(L3, [0]), [0])
    assert is_stabilizer(tensor_product(basis_state(L3, [0], ["a"]), plus.rename(["b"])))
    assert not is_stabilizer(state_from_ints(L5, [1, 1, 0, 0, 0]))
    with pytest.raises(ZeroStateError):
        is_stabilizer(state_from_ints(L5, [0] * 5))


@given(st.lists(st.integers(-1, 1), min_size=9, max_size=9))
def test_wigner_and_exact_verdicts_agree(values):
    L = Level(3)
    if not any(values):
        return
    s = state_from_ints(L, np.array(values).reshape(3, 3))
    # is_stabilizer raises if the two independent verdicts disagree
    verdict = is_stabilizer(s)
    assert verdict == wigner_is_stabilizer(wigner_function(s))


def test_affine_quadratic_form_of_non_stabilizer_raises():
    with pytest.raises(NotStabilizerError):
        affine_quadratic_form(state_from_ints(Level(5), [2, 1, 0, 0, 0]))


# tableaux ---------------------------------------------------------------------------

def test_group_search_hopf_k3():
    L = Level(3)
    t = stabilizer_group_search(hopf_state(L))
    expected = StabilizerTableau(L, [PauliOp(L, (0, -1), (1, 0)), PauliOp(L, (-1, 0), (0, 1))])
    assert group_elements(t) == group_elements(expected)


def test_group_search_basis_state():
    L = Level(5)
    t = stabilizer_group_search(basis_state(L, [0]))
    assert group_elements(t) == group_elements(StabilizerTableau(L, [PauliOp(L, (1,), (0,))]))


def test_group_search_fusion_round_trip(level):
    f = fusion_state(level)
    t = stabilizer_group_search(f)
    assert dense_from_tableau(t).proportional(f)
    assert any(not any(g.x_exp) for g in group_elements(t) if any(g.z_exp))


def test_group_search_rejects_non_stabilizer():
    with pytest.raises(NotStabilizerError):
        stabilizer_group_search(state_from_ints(Level(3), [1, 1, 0]))


def test_dense_from_tableau_examples():
    L = Level(5)
    z = dense_from_tableau(StabilizerTableau(L, [PauliOp(L, (1,), (0,))]))
    assert z.proportional(basis_state(L, [0]))
    x = dense_from_tableau(StabilizerTableau(L, [PauliOp(L, (0,), (1,))]))
    assert x.proportional(state_from_ints(L, [1] * 5))


def test_tableau_validation():
    L = Level(3)
    with pytest.raises(ValueError, match="do not commute"):
        StabilizerTableau(L, [PauliOp(L, (1, 0), (0, 0)), PauliOp(L, (0, 0), (1, 0))])
    with pytest.raises(ValueError, match="not independent"):
        StabilizerTableau(L, [PauliOp(L, (1, 0), (0, 0)), PauliOp(L, (2, 0), (0, 0))])
    with pytest.raises(ValueError, match="need 2 generators"):
        StabilizerTableau(L, [PauliOp(L, (1, 0), (0, 0))])


@pytest.mark.parametrize("k", [3, 5])
def test_round_trip_on_random_word_states(k):
    L = Level(k)
    for s in word_states(L, 20, seed=7, max_n=3 if k == 3 else 2):
        t = stabilizer_group_search(s)
        assert dense_from_tableau(t).proportional(s)
        for g, h in itertools.combinations(t.generators, 2):
            assert g.commutes(h)
        t2 = tableau_from_state(s)
        assert group_elements(t2) == group_elements(t)
        assert StabilizerTableau.from_text(L, t.to_text()).to_text() == t.to_text()


def test_generated_tableau_stabilizes(level):
    for s in corpus(level):
        t = tableau_from_state(s)
        assert stabilizes(t, s)
        assert dense_from_tableau(t, s.names).proportional(s)


# entropy from tableaux ---------------------------------------------------------------

def test_entropy_examples():
    L = Level(3)
    tf = tableau_from_state(fusion_state(L))
    assert [entropy_from_tableau(tf, [i]) for i in range(3)] == [1, 1, 1]
    t0 = tableau_from_state(basis_state(L, [0, 0]))
    assert entropy_from_tableau(t0, [0]) == 0 and entropy_from_tableau(t0, [0, 1]) == 0
    th = tableau_from_state(hopf_state(L))
    assert entropy_from_tableau(th, [0]) == 1
    assert entropy_from_tableau(th, []) == 0


def test_entropy_matches_density_matrix_oracle(level):
    for s in corpus(level):
        t = tableau_from_state(s)
        for r in range(s.n + 1):
            for region in itertools.combinations(range(s.n), r):
                assert abs(entropy_from_tableau(t, region) - entropy_oracle_dits(s, region)) < 1e-9
