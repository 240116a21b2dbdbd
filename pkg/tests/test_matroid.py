from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from braidkl.matroid import (
    Matroid,
    Multigraph,
    are_isomorphic,
    beta_invariant,
    braid,
    check_basis_exchange,
    closure,
    coloop,
    complete_graph,
    connected_components,
    contract,
    delete,
    direct_sum,
    dual,
    flats_lattice,
    from_graph,
    has_minor,
    is_connected,
    is_quasi_series_parallel,
    is_quasi_series_parallel_by_minors,
    is_series_parallel,
    is_series_parallel_by_minors,
    is_simple,
    isomorphism_classes,
    loop,
    minor,
    parallel_extension,
    parse_multigraph,
    rank_of,
    relabel,
    series_extension,
    simplified_contraction,
    simplify,
    uniform,
)
from braidkl.spenum import enum_qsp, enum_series_parallel

from reference_data import QSP_4_2_CLASSES, SIMPLE_QSP_7_4_CLASSES, SP_6_3_CLASSES


def graph(pairs):
    return from_graph(Multigraph.from_pairs(pairs))


def brute_rank(m, s):
    return max(bin(b & s).count("1") for b in m.bases)


def test_uniform_and_constructors():
    assert uniform(2, 3).bases == (0b011, 0b101, 0b110)
    assert loop().rank == 0 and loop().n == 1
    assert coloop().bases == (1,)
    with pytest.raises(ValueError):
        Matroid(2, (0b01, 0b11))


def test_from_graph_examples():
    assert graph([(0, 1), (1, 2), (2, 0)]) == uniform(2, 3)
    single_loop = graph([(0, 0)])
    assert single_loop.rank == 0 and single_loop.bases == (0,)
    k4 = from_graph(complete_graph(4))
    assert k4.rank == 3 and len(k4.bases) == 16


def test_braid_examples():
    assert braid(3) == uniform(2, 3)
    assert braid(4).rank == 3
    assert braid(2) == coloop()
    assert len(braid(6).bases) == 6 ** 4


def test_rank_and_closure():
    assert rank_of(uniform(2, 3), 0b011) == 2
    k4 = braid(4)
    assert closure(k4, k4.ground) == k4.ground
    for e in range(6):
        assert closure(k4, 1 << e) == 1 << e
    for s in range(1 << 6):
        assert rank_of(k4, s) == brute_rank(k4, s)


def test_flats():
    assert flats_lattice(braid(4)).counts() == (1, 6, 7, 1)
    assert flats_lattice(braid(5)).counts() == (1, 10, 25, 15, 1)
    assert flats_lattice(uniform(1, 1)).flats == [0, 1]
    assert flats_lattice(uniform(0, 2)).counts() == (1,)


def test_flats_brute_force():
    m = graph([(0, 1), (1, 2), (2, 0), (2, 3), (2, 3)])
    lattice = flats_lattice(m)
    expected = [
        s for s in range(1 << m.n)
        if all(brute_rank(m, s | 1 << e) > brute_rank(m, s) for e in range(m.n) if not s >> e & 1)
    ]
    assert sorted(lattice.flats) == expected


def test_duality_and_sums():
    assert dual(uniform(1, 2)) == uniform(1, 2)
    assert dual(loop()) == coloop()
    s = direct_sum(loop(), coloop())
    assert s.rank == 1 and s.n == 2 and not is_connected(s)
    assert direct_sum(coloop(), loop()).bases == (0b01,)


def test_minors_relabel_in_order():
    m = braid(4)
    assert delete(m, 0).n == 5 and delete(m, 0).rank == 3
    assert contract(m, 0).rank == 2
    assert minor(m, contract=0b1, delete=0b10) == delete(contract(m, 0), 0)
    assert dual(delete(m, 3)) == contract(dual(m), 3)


def test_components():
    assert len(connected_components(uniform(2, 2))) == 2
    assert connected_components(uniform(1, 2)) == [0b11]
    assert is_connected(graph(SP_6_3_CLASSES[0][0]))


def test_components_against_circuit_connectivity():
    m = direct_sum(uniform(2, 3), direct_sum(loop(), uniform(1, 2)))
    # two elements share a component iff some circuit contains both
    from braidkl.matroid import circuits

    cs = circuits(m)
    comps = connected_components(m)
    for a, b in combinations(range(m.n), 2):
        together = any(c >> a & 1 and c >> b & 1 for c in cs)
        same = any(c >> a & 1 and c >> b & 1 for c in comps)
        assert together == same


@pytest.mark.parametrize("m, beta", [(uniform(1, 1), 1), (uniform(2, 2), 0), (uniform(1, 2), 1), (braid(4), 2), (uniform(2, 4), 2)])
def test_beta(m, beta):
    assert beta_invariant(m) == beta


def test_minor_detection():
    assert has_minor(uniform(2, 4), "U24")
    assert has_minor(braid(4), "MK4")
    assert not has_minor(braid(4), "U24")
    assert has_minor(braid(5), "MK4")
    with pytest.raises(ValueError):
        has_minor(braid(4), "F7")


def test_series_parallel_predicates():
    assert is_series_parallel(loop()) and is_series_parallel(coloop())
    assert not is_series_parallel(uniform(2, 2))
    for pairs, _ in SP_6_3_CLASSES:
        assert is_series_parallel(graph(pairs))
    assert is_quasi_series_parallel(uniform(2, 2))
    assert not is_quasi_series_parallel(braid(4))
    for pairs, _ in QSP_4_2_CLASSES:
        assert is_quasi_series_parallel(graph(pairs))


def test_predicates_match_minor_characterisation():
    for n in range(1, 6):
        for ms in enum_series_parallel(n).values():
            for m in ms:
                assert is_series_parallel_by_minors(m)
                assert not has_minor(m, "U24") and not has_minor(m, "MK4")
    others = [uniform(2, 4), uniform(3, 5), braid(4), direct_sum(uniform(2, 2), uniform(1, 3))]
    for m in others:
        assert is_series_parallel(m) == is_series_parallel_by_minors(m)
        assert is_quasi_series_parallel(m) == is_quasi_series_parallel_by_minors(m)


def test_extensions():
    assert parallel_extension(uniform(1, 1), 0) == uniform(1, 2)
    for e in (0, 1):
        ext = series_extension(uniform(1, 2), e)
        assert ext == uniform(2, 3) and check_basis_exchange(ext)
    m = graph(SP_6_3_CLASSES[1][0])
    assert series_extension(m, 2).rank == m.rank + 1
    assert parallel_extension(m, 2).rank == m.rank
    with pytest.raises(ValueError):
        series_extension(coloop(), 0)
    with pytest.raises(ValueError):
        parallel_extension(loop(), 0)


def test_extension_label_placement():
    m = parallel_extension(uniform(1, 1), 0)
    placed = parallel_extension(direct_sum(coloop(), coloop()), 0, label=1)
    assert placed.n == 3
    # element 1 is the new one, parallel to 0; element 2 is the old coloop
    assert simplify(placed)[1] == (0, 0, 1)
    assert m.n == 2


def test_simplify():
    s, classes = simplify(uniform(1, 3))
    assert s == uniform(1, 1) and classes == (0, 0, 0)
    assert simplify(uniform(2, 3))[0] == uniform(2, 3)
    assert simplify(direct_sum(loop(), uniform(1, 2)))[1] == (None, 0, 0)
    k4 = braid(4)
    sub, _ = simplified_contraction(k4, 1)
    assert sub == braid(3)
    assert simplify(contract(k4, 0))[0] == braid(3)


def test_simplified_contraction_matches_partition_shape():
    k5 = braid(5)
    for flat in flats_lattice(k5).by_rank[2]:
        sub, _ = simplified_contraction(k5, flat)
        assert sub.rank == 2 and is_simple(sub)
        assert are_isomorphic(sub, braid(3))


def test_is_simple():
    assert not is_simple(uniform(1, 2))
    assert is_simple(uniform(2, 3))
    for pairs, _ in SIMPLE_QSP_7_4_CLASSES:
        m = graph(pairs)
        assert is_simple(m) and is_quasi_series_parallel(m)


def test_isomorphism():
    k4 = braid(4)
    assert are_isomorphic(k4, k4)
    assert not are_isomorphic(uniform(2, 3), uniform(1, 3))
    assert are_isomorphic(k4, relabel(k4, (5, 3, 1, 0, 2, 4)))
    a = graph([(0, 1), (0, 1), (1, 2), (2, 0)])
    b = direct_sum(uniform(1, 2), uniform(1, 2))
    assert not are_isomorphic(a, b)


@given(st.permutations(range(6)))
@settings(max_examples=25, deadline=None)
def test_isomorphism_invariant_under_relabeling(perm):
    for pairs, _ in SP_6_3_CLASSES:
        m = graph(pairs)
        assert are_isomorphic(m, relabel(m, perm))


def test_orbit_sizes_of_rank3_sp_on_six():
    classes = isomorphism_classes(enum_series_parallel(6)[3])
    reps = [graph(p) for p, _ in SP_6_3_CLASSES]
    sizes = {next(i for i, r in enumerate(reps) if are_isomorphic(r, c[0])): len(c) for c in classes}
    assert sizes == {i: size for i, (_, size) in enumerate(SP_6_3_CLASSES)}


def test_orbit_sizes_of_rank2_qsp_on_four():
    classes = isomorphism_classes(enum_qsp(4)[2])
    assert sorted(len(c) for c in classes) == sorted(size for _, size in QSP_4_2_CLASSES)


def test_parse_multigraph_roundtrip(tmp_path):
    g = complete_graph(4)
    text = "# K4\n" + g.to_text() + "\n"
    assert parse_multigraph(text) == g
    with pytest.raises(ValueError):
        parse_multigraph("0 1\n")
    with pytest.raises(ValueError):
        parse_multigraph("0 1 0\n1 2 0\n")
    with pytest.raises(ValueError):
        parse_multigraph("0 x 0\n")


def test_ground_set_limit():
    with pytest.raises(ValueError):
        Matroid(17, (0,))
