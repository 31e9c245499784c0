from __future__ import annotations

import pytest

from chainrouting.verify import check_size, min_arcs_for_max_disjoint, render_verify, verify_laws


@pytest.mark.parametrize("n, u", [(2, 1), (3, 3), (4, 5), (5, 7), (6, 9), (7, 11), (8, 13)])
def test_brute_force_arc_minimum(n, u):
    assert min_arcs_for_max_disjoint(n) == u


def test_every_law_holds_up_to_ten():
    rep = verify_laws(10)
    assert rep.passed
    assert [r.n for r in rep.rows] == list(range(2, 11))


def test_size_two_has_no_deletion_check():
    row = check_size(2)
    assert row.results["vertex_deletion"] is None
    assert row.passed


def test_bounds():
    with pytest.raises(ValueError):
        verify_laws(1)
    with pytest.raises(ValueError):
        verify_laws(11)


def test_render_is_stable():
    assert render_verify(verify_laws(6)) == render_verify(verify_laws(6))
