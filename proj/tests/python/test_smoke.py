import itertools
import math

import pytest

import qica


def test_partition_counts():
    assert qica.count_partitions(9, 3, "uniform") == 280
    assert qica.count_partitions(5, 2) == 15
    parts = qica.enumerate_partitions(4, 2, "uniform")
    assert parts == [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]]
    with pytest.raises(qica.ParameterError):
        qica.count_partitions(5, 2, "weird")


def test_qualitative_independence():
    assert qica.is_qualitatively_independent("1 2 | 3 4", "1 3 | 2 4")
    assert not qica.is_qualitatively_independent("1 2 | 3 4", "1 2 | 3 4")
    assert qica.meet_table("1 2 | 3 4", "1 3 | 2 4") == [[1, 1], [1, 1]]


def _covers(rows, k):
    for a, b in itertools.combinations(rows, 2):
        if len(set(zip(a, b))) != k * k:
            return False
    return True


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_finite_field_array(k):
    rows = qica.construct_finite_field_ca(k)
    assert len(rows) == k + 1
    assert all(len(r) == k * k for r in rows)
    assert _covers(rows, k)
    assert qica.verify_ca(rows, k)


def test_starters():
    v = qica.search_starter(3, 5)
    assert v == [0, 1, 1, 1, 2]
    assert qica.verify_starter(v, 3)
    rows = qica.expand_starter(v, 3)
    assert _covers(rows, 3)
    assert qica.search_starter(3, 4) is None
    with pytest.raises(qica.ResourceError):
        qica.search_starter(6, 9, budget=1)


def test_binary_can():
    def oracle(r):
        n = 1
        while math.comb(n - 1, (n + 1) // 2) < r:
            n += 1
        return n

    for r in (2, 3, 4, 10, 11, 35, 36, 1000):
        assert qica.binary_can(r) == oracle(r)


def test_graphs():
    g = qica.build_graph("qi", 5, 2)
    assert g["vertices"] == 10
    assert g["edges"] == 30
    clique, exact = qica.max_clique("qi", 5, 2)
    assert exact and len(clique) == 4
    colors, exact, _ = qica.chromatic_number("qi", 5, 2)
    assert exact and colors == 5


def test_spectrum_and_ratio_bound():
    spec = {value: mult for value, mult, _ in qica.spectrum(9, 3)}
    assert spec["36"] == 1
    assert spec["-12"] == 27
    assert sum(spec.values()) == 280
    alpha, omega = qica.ratio_bounds(280, 36, -12)
    assert alpha == 70 and omega == 4


def test_char_poly():
    # Path on three vertices: x^3 - 2x.
    assert qica.char_poly([[0, 1, 0], [1, 0, 1], [0, 1, 0]]) == [0, -2, 0, 1]


def test_eigenmatrix_and_scheme():
    em = qica.modified_eigenmatrix(9, 3)
    assert em["exact"] and em["commuting"]
    assert len(em["rows"]) == 5
    assert sorted(m for m, _ in em["rows"]) == [1, 27, 48, 84, 120]
    verdict = qica.check_association_scheme(9, 3)
    assert verdict["symmetric"] and verdict["scheme"]
    assert len(qica.meet_classes(9, 3)) == 5


def test_cli_in_process():
    code, out, _ = qica.run_cli(["partition", "count", "-n", "9", "-k", "3", "--filter", "uniform"])
    assert code == 0 and out == "280\n"
    code, _, _ = qica.run_cli(["ca", "construct", "-k", "6"])
    assert code == 2
