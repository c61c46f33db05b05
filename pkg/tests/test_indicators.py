import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from epochma.indicators import (
    Front,
    combine_fronts,
    extract_front,
    front_from_portfolios,
    generational_distance,
    hypervolume,
    read_front,
    reference_point,
    select_by_sharpe,
    write_front,
)
from epochma.portfolio import Portfolio

from .oracles import compressed_hypervolume, grid_hypervolume, nearest_gd, pairwise_front


def pts(front):
    return [tuple(p) for p in front.points]


def fake_portfolio(risk, ret):
    return Portfolio(np.array([1.0]), risk, ret, ret / risk)


def test_front_examples():
    assert pts(extract_front([(0.1, 0.5), (0.2, 0.4)])) == [(0.1, 0.5)]
    assert pts(extract_front([(0.1, 0.4), (0.2, 0.5)])) == [(0.1, 0.4), (0.2, 0.5)]


def test_front_random_matches_oracle():
    rng = np.random.default_rng(0)
    P = rng.random((200, 2))
    assert pts(extract_front(P)) == pairwise_front(P.tolist())


point_sets = st.lists(st.tuples(st.integers(0, 8).map(lambda x: x / 8), st.integers(0, 8).map(lambda x: x / 8)),
                      max_size=40)


@given(point_sets)
def test_front_invariants(points):
    f = extract_front(points)
    assert pts(f) == pairwise_front(points)
    assert np.all(np.diff(f.risk) > 0)
    assert np.all(np.diff(f.ret) > 0)


def test_combine():
    rng = np.random.default_rng(1)
    A = extract_front(rng.random((50, 2)))
    B = extract_front(rng.random((50, 2)))
    assert pts(combine_fronts([A])) == pts(A)
    assert pts(combine_fronts([A, A])) == pts(A)
    assert pts(combine_fronts([A, B])) == pairwise_front(pts(A) + pts(B))


def test_hypervolume_examples():
    assert hypervolume(extract_front([(0.2, 0.8)]), (1.0, 0.0)) == pytest.approx(0.64)
    two = extract_front([(0.2, 0.8), (0.5, 0.9)])
    assert hypervolume(two, (1.0, 0.0)) == pytest.approx(0.69, abs=1e-12)
    assert abs(grid_hypervolume(pts(two), (1.0, 0.0)) - 0.69) / 0.69 <= 1e-3
    assert hypervolume(extract_front([(1.0, 0.0)]), (1.0, 0.0)) == 0.0


@given(point_sets.filter(lambda p: len(p) > 0))
def test_hypervolume_exact_on_lattice(points):
    ref = (1.25, -0.25)
    f = extract_front(points)
    assert hypervolume(f, ref) == pytest.approx(float(compressed_hypervolume(points, ref)), abs=1e-12)


def test_hypervolume_clips_outside_points():
    f = extract_front([(0.2, 0.8), (1.5, 0.95)])
    assert hypervolume(f, (1.0, 0.0)) == pytest.approx(0.64)


@given(point_sets.filter(lambda p: len(p) > 0), st.tuples(st.floats(0, 1), st.floats(0, 1)))
def test_hypervolume_monotone_under_addition(points, extra):
    f = extract_front(points)
    ref = (1.0, 0.0)
    assert hypervolume(extract_front(points + [extra]), ref) >= hypervolume(f, ref) - 1e-12


def test_gd_examples():
    ref = extract_front([(0.1, 0.2), (0.3, 0.4)])
    assert generational_distance(ref, ref) == 0.0
    assert generational_distance(extract_front([(0.1, 0.2)]), ref) == 0.0
    assert generational_distance(extract_front([(0.0, 0.0)]), extract_front([(3.0, 4.0)])) == 5.0
    assert math.isnan(generational_distance(Front.empty(), ref))
    with pytest.raises(ValueError):
        generational_distance(ref, Front.empty())


def test_gd_random_oracle():
    rng = np.random.default_rng(5)
    r = np.sort(rng.random(20))
    A = Front(r, np.sqrt(r))
    r2 = np.sort(rng.random(50))
    R = Front(r2, np.sqrt(r2) + 0.05)
    assert abs(generational_distance(A, R) - nearest_gd(pts(A), pts(R))) <= 1e-12


def test_reference_point():
    f = extract_front([(0.1, 0.2), (0.3, 0.4), (0.2, 0.3)])
    assert reference_point(f) == (0.3, 0.2)
    with pytest.raises(ValueError):
        reference_point(Front.empty())


def test_select_by_sharpe():
    one = front_from_portfolios([fake_portfolio(0.2, 0.1)])
    assert select_by_sharpe(one).risk == 0.2
    f = front_from_portfolios([fake_portfolio(0.2, 0.10), fake_portfolio(0.4, 0.18)])
    # 0.10/0.2 = 0.50 beats 0.18/0.4 = 0.45
    assert select_by_sharpe(f).ret == 0.10
    ties = front_from_portfolios([fake_portfolio(0.4, 0.2), fake_portfolio(0.2, 0.1), fake_portfolio(0.8, 0.4)])
    assert select_by_sharpe(ties).risk == 0.2
    with pytest.raises(ValueError):
        select_by_sharpe(Front.empty())


def test_front_csv_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    f = extract_front(rng.random((60, 2)))
    for rf in (0.0, None):
        path = tmp_path / f"f_{rf}.csv"
        write_front(path, f, rf)
        back = read_front(path)
        assert np.array_equal(back.risk, f.risk) and np.array_equal(back.ret, f.ret)
    write_front(tmp_path / "e.csv", Front.empty())
    assert len(read_front(tmp_path / "e.csv")) == 0
