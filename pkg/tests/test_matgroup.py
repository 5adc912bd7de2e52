import itertools

import numpy as np
import pytest

from lgdiv.errors import CapExceeded, ModulusMismatch, NotASubgroup, NotReductionKernel, SylowNotNormal
from lgdiv.models.matgroup import (GL2Element, MatrixGroup, close, commutator, contains_nontrivial_scalar,
                                   cyclic_generator, cyclic_subgroups, det_image, diagonal_part,
                                   element_order, from_elements, gl2_generators, gl2_order,
                                   h_dimension, is_cyclic, is_normal, p_sylow, reduction_split,
                                   trivial_group)
from tests.helpers import as_set, mat

SIGMA = (1, 1, 0, 1)


def bfs_closure(gens, q):
    """ Independent closure over plain tuples. """
    def mul(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q)
    seen = {(1, 0, 0, 1)}
    frontier = [(1, 0, 0, 1)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def test_invertible_count_mod_5():
    count = sum(1 for a, b, c, d in itertools.product(range(5), repeat=4) if (a * d - b * c) % 5)
    assert count == 480 == gl2_order(5, 1)


def test_close_full_gl2():
    G = close(gl2_generators(5))
    assert G.order == 480
    assert G.check_closed()


@pytest.mark.parametrize("gens,q,order", [
    ([SIGMA], 5, 5),
    ([(2, 0, 0, 1), SIGMA], 5, 20),
    ([(2, 0, 0, 3)], 5, 4),
    ([SIGMA], 25, 25),
    ([(2, 0, 0, 3)], 25, 20),
])
def test_closure_orders(gens, q, order):
    G = close([mat(g, q) for g in gens])
    assert G.order == order
    assert as_set(G) == bfs_closure(gens, q)


def test_identity_comes_first_and_table_is_left_multiplication():
    G = close([mat((2, 0, 0, 1), 5), mat(SIGMA, 5)])
    assert G.elements[0].is_identity()
    for s, g in enumerate(G.generators):
        for h in range(G.order):
            assert G.elements[G.gen_table[s, h]] == g * G.elements[h]


def test_closure_is_deterministic():
    gens = [mat((2, 0, 0, 1), 5), mat(SIGMA, 5)]
    assert [g.entries for g in close(gens).elements] == [g.entries for g in close(gens).elements]


def test_closure_checks_its_result(monkeypatch):
    seen = []
    monkeypatch.setattr(MatrixGroup, "check_closed", lambda self: seen.append(self.order) or True)
    close([mat(SIGMA, 5)])
    trivial_group(25)
    assert seen == [5, 1]


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        close(gl2_generators(5), cap=100)


def test_non_invertible_is_rejected():
    with pytest.raises(ValueError):
        GL2Element((1, 5, 0, 0), 25)


def test_mixed_moduli_are_rejected():
    with pytest.raises(ModulusMismatch):
        close([mat(SIGMA, 5), mat(SIGMA, 25)])


@pytest.mark.parametrize("entries,q,order", [
    ((2, 0, 0, 3), 5, 4),
    (SIGMA, 5, 5),
    (SIGMA, 25, 25),
    ((1, 0, 0, 1), 25, 1),
])
def test_element_order(entries, q, order):
    assert element_order(mat(entries, q)) == order


def test_cyclic_subgroups_of_prime_order_group():
    G = close([mat(SIGMA, 5)])
    orders = sorted(C.order for C in cyclic_subgroups(G))
    assert orders == [1, 5]


def test_cyclic_subgroups_of_split_torus():
    G = close([mat((2, 0, 0, 1), 5), mat((1, 0, 0, 2), 5)])
    assert G.order == 16
    oracle = {frozenset(as_set(close([g]))) for g in G.elements}
    found = {frozenset(as_set(C)) for C in cyclic_subgroups(G)}
    assert found == oracle
    maximal = cyclic_subgroups(G, maximal_only=True)
    assert all(C.order == 4 for C in maximal)


def test_is_cyclic_and_generator():
    G = close([mat((2, 0, 0, 3), 5)])
    assert is_cyclic(G)
    g = cyclic_generator(G)
    assert element_order(g) == 4
    torus = close([mat((2, 0, 0, 1), 5), mat((1, 0, 0, 2), 5)])
    assert not is_cyclic(torus)
    assert cyclic_generator(torus) is None


def test_reduction_of_full_kernel():
    gens = [mat((1 + 5 * a, 5 * b, 5 * c, 1 + 5 * d), 25)
            for a, b, c, d in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]]
    G2 = close(gens)
    assert G2.order == 625
    G1, H = reduction_split(G2)
    assert G1.order == 1
    assert H.order == 625
    assert h_dimension(H) == 4


@pytest.mark.parametrize("gens,g1,h", [
    ([SIGMA], 5, 5),
    ([(2, 0, 0, 3)], 4, 5),
])
def test_reduction_split(gens, g1, h):
    G1, H = reduction_split(close([mat(g, 25) for g in gens]))
    assert (G1.order, H.order) == (g1, h)


def test_h_dimension_one_parameter():
    H = close([mat((1, 5, 0, 1), 25)])
    assert h_dimension(H) == 1


def test_h_dimension_rejects_non_kernel():
    with pytest.raises(NotReductionKernel):
        h_dimension(close([mat(SIGMA, 25)]))


def test_p_sylow():
    assert p_sylow(close([mat((2, 0, 0, 3), 5)])).order == 1
    borel = close([mat((2, 0, 0, 1), 5), mat(SIGMA, 5)])
    P = p_sylow(borel, strict=True)
    assert as_set(P) == as_set(close([mat(SIGMA, 5)]))
    G2 = close([mat(SIGMA, 25)])
    assert p_sylow(G2).order == 25


def test_p_sylow_not_normal():
    G = close(gl2_generators(5))
    with pytest.raises(SylowNotNormal):
        p_sylow(G, strict=True)
    assert p_sylow(G).order == 5


def test_diagonal_part_of_borel():
    borel = close([mat((2, 0, 0, 1), 5), mat(SIGMA, 5)])
    GD = diagonal_part(borel)
    assert as_set(GD) == as_set(close([mat((2, 0, 0, 1), 5)]))


def test_diagonal_part_not_normal_in_borel():
    borel = close([mat((2, 0, 0, 1), 5), mat(SIGMA, 5)])
    assert not is_normal(diagonal_part(borel), borel)
    assert is_normal(close([mat(SIGMA, 5)]), borel)


def test_is_normal_requires_subgroup():
    with pytest.raises(NotASubgroup):
        is_normal(close([mat((2, 0, 0, 3), 5)]), close([mat(SIGMA, 5)]))


def test_commutator_formula_example():
    delta = mat(SIGMA, 5)
    gamma = mat((2, 0, 0, 3), 5)
    assert commutator(delta, gamma).entries == (1, 2, 0, 1)
    assert commutator(delta, delta).is_identity()


def test_det_image():
    assert det_image(close([mat((2, 0, 0, 3), 5)]), 5) == [1]
    assert det_image(close(gl2_generators(5)), 5) == [1, 2, 3, 4]


def test_contains_nontrivial_scalar():
    assert contains_nontrivial_scalar(close([mat((2, 0, 0, 2), 5)])) is not None
    assert contains_nontrivial_scalar(close([mat(SIGMA, 5)])) is None


def test_from_elements_and_trivial_group():
    G = close([mat((2, 0, 0, 1), 5), mat(SIGMA, 5)])
    H = from_elements([g for g in G.elements if g.is_diagonal()], 5)
    assert H.order == 4
    assert trivial_group(25).order == 1


def test_arrays_follow_element_order():
    G = close([mat(SIGMA, 25)])
    arrays = G.arrays()
    assert arrays.shape == (25, 2, 2)
    assert np.array_equal(arrays[3], G.elements[3].as_array())
