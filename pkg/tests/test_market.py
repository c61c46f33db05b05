import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from epochma.market import (
    AssetUniverse,
    DataError,
    PriceSeries,
    build_universe,
    load_prices,
    to_returns,
    universe_from_csv,
)

from .oracles import two_pass_variance


def write(tmp_path, text, name="p.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_three_rows(tmp_path):
    s = load_prices(write(tmp_path, "A,B\n100,50\n110,55\n121,60.5\n"))
    assert s.prices.shape == (3, 2)
    assert s.asset_names == ("A", "B")


def test_zero_price_names_row(tmp_path):
    with pytest.raises(DataError, match="row 2"):
        load_prices(write(tmp_path, "A,B\n100,50\n0,55\n121,60.5\n"))


def test_header_only(tmp_path):
    with pytest.raises(DataError, match="at least 2 price rows required"):
        load_prices(write(tmp_path, "A,B\n"))


@pytest.mark.parametrize("body,needle", [
    ("A,B\n100,50\n110\n", "row 2"),
    ("A,B\n100,x\n110,55\n", "non-numeric"),
    ("A,B\n100,-3\n110,55\n", "non-positive"),
])
def test_malformed_rows(tmp_path, body, needle):
    with pytest.raises(DataError, match=needle):
        load_prices(write(tmp_path, body))


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_prices(tmp_path / "nope.csv")


def test_semicolon_delimiter(tmp_path):
    s = load_prices(write(tmp_path, "A;B\n1;2\n2;4\n"), delimiter=";")
    np.testing.assert_array_equal(to_returns(s), [[1.0, 1.0]])


def test_series_needs_two_columns():
    with pytest.raises(DataError):
        PriceSeries(("A",), np.array([[1.0], [2.0]]))


def test_returns_arithmetic():
    s = PriceSeries(("A", "B"), np.array([[100, 50], [110, 50], [121, 50]], dtype=float))
    np.testing.assert_allclose(to_returns(s), [[0.1, 0.0], [0.1, 0.0]], atol=1e-15)
    s2 = PriceSeries(("A", "B"), np.array([[100, 50], [110, 55]], dtype=float))
    np.testing.assert_allclose(to_returns(s2), [[0.1, 0.1]], atol=1e-15)


def test_mean_and_variance_hand_value():
    u = build_universe([[0.1], [0.3]])
    assert u.mean_returns[0] == pytest.approx(0.2, abs=1e-15)
    assert u.covariance[0, 0] == pytest.approx(0.02, abs=1e-15)
    assert u.covariance[0, 0] == pytest.approx(two_pass_variance([0.1, 0.3]), abs=1e-15)


def test_identical_columns():
    col = np.array([0.01, -0.02, 0.05, 0.0])
    u = build_universe(np.column_stack([col, col]))
    assert u.covariance[0, 1] == u.covariance[0, 0]


def test_universe_validation():
    with pytest.raises(DataError):
        AssetUniverse(np.zeros(2), np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(DataError):
        AssetUniverse(np.zeros(2), np.array([[-1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(DataError):
        AssetUniverse(np.zeros(3), np.eye(2))


def test_universe_read_only():
    u = build_universe(np.random.default_rng(0).normal(size=(5, 3)))
    with pytest.raises(ValueError):
        u.covariance[0, 0] = 1.0


def test_bundled_dataset(bundled_universe):
    u = bundled_universe
    assert u.n == 20
    assert len(set(np.round(u.mean_returns, 6))) == 20
    assert len(set(np.round(np.diag(u.covariance), 8))) == 20


def test_universe_from_csv(tmp_path):
    u = universe_from_csv(write(tmp_path, "A,B\n100,50\n110,55\n121,55\n"), 0.01)
    assert u.risk_free_rate == 0.01
    assert u.asset_names == ("A", "B")
    np.testing.assert_allclose(u.mean_returns, [0.1, 0.05])


returns_st = st.integers(2, 12).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: arrays(np.float64, (m, n), elements=st.floats(-0.5, 0.5, allow_subnormal=False))
    )
)


@given(returns_st)
def test_covariance_symmetric_psd(r):
    u = build_universe(r)
    assert np.array_equal(u.covariance, u.covariance.T)
    assert np.all(np.diag(u.covariance) >= 0)
    scale = max(1.0, np.abs(u.covariance).max())
    assert np.linalg.eigvalsh(u.covariance).min() >= -1e-12 * scale * u.n


@given(returns_st, st.floats(0.1, 10.0))
def test_covariance_scales_quadratically(r, c):
    a = build_universe(r)
    b = build_universe(r * c)
    np.testing.assert_allclose(b.covariance, c * c * a.covariance, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(b.mean_returns, c * a.mean_returns, rtol=1e-9, atol=1e-15)


@given(returns_st, st.floats(-0.1, 0.1))
def test_covariance_shift_invariant(r, shift):
    a = build_universe(r)
    b = build_universe(r + shift)
    np.testing.assert_allclose(b.covariance, a.covariance, atol=1e-12)
