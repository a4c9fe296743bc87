import cmath
import json

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from detk.matnum import (
    aberth_roots,
    as_matrix,
    charpoly,
    eig_small,
    lu_det,
    mat_exp,
    matrix_from_json_obj,
    matrix_to_json_obj,
    read_matrix,
    regularized_det,
    regularized_det_spectral,
    write_matrix,
)
from detk.verify import sample_matrix


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def unit_disk(rng, n):
    r = np.sqrt(rng.random((n, n)))
    return r * np.exp(2j * np.pi * rng.random((n, n)))


def test_as_matrix_rejects():
    with pytest.raises(ValueError):
        as_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])


def test_lu_det_examples():
    for n in (1, 3, 7):
        assert lu_det(np.eye(n)) == 1
    assert lu_det([[2, 3], [5, 7]]) == pytest.approx(2 * 7 - 3 * 5)
    U = np.triu(np.arange(1, 17).reshape(4, 4)).astype(complex)
    assert lu_det(U) == pytest.approx(np.prod(np.diag(U)))
    assert lu_det([[1, 2], [2, 4]]) == 0
    # needs a row swap
    assert lu_det([[0, 1], [1, 0]]) == -1


def test_lu_det_vs_numpy():
    rng = np.random.default_rng(3)
    for n in (2, 5, 8, 16):
        M = unit_disk(rng, n)
        assert rel(lu_det(M), np.linalg.det(M)) < 1e-12


def test_det_multiplicative():
    rng = np.random.default_rng(11)
    for _ in range(20):
        M, N = unit_disk(rng, 8), unit_disk(rng, 8)
        dm, dn = lu_det(M), lu_det(N)
        assert abs(lu_det(M @ N) - dm * dn) <= 1e-10 * (1 + abs(dm * dn))


def test_mat_exp_examples():
    assert np.array_equal(mat_exp(np.zeros((3, 3))), np.eye(3))
    lam = np.array([0.3, -2.0 + 1j, 5.0])
    E = mat_exp(np.diag(lam))
    assert np.allclose(np.diag(E), np.exp(lam), rtol=1e-14, atol=0)
    assert np.count_nonzero(E - np.diag(np.diag(E))) == 0
    N = np.array([[0, 1], [0, 0]], dtype=complex)
    assert np.allclose(mat_exp(N), np.eye(2) + N, rtol=0, atol=1e-16)


@pytest.mark.parametrize("scale", [1e-3, 0.2, 1.0, 7.0, 40.0, 100.0])
def test_mat_exp_vs_scipy(scale):
    rng = np.random.default_rng(int(scale * 1000))
    M = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    M *= scale / np.linalg.norm(M, 2)
    E, R = mat_exp(M), scipy.linalg.expm(M)
    assert np.linalg.norm(E - R) / np.linalg.norm(R) < 1e-13


def test_mat_exp_additive_on_commuting():
    rng = np.random.default_rng(5)
    for _ in range(10):
        M = unit_disk(rng, 6)
        M *= 2 / np.linalg.norm(M, 2)
        s, t = rng.random(2) * 2 - 1
        lhs = mat_exp(s * M) @ mat_exp(t * M)
        rhs = mat_exp((s + t) * M)
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) < 1e-11


def test_det_of_exp_is_exp_of_trace():
    rng = np.random.default_rng(8)
    for n in (2, 4, 8):
        M = unit_disk(rng, n)
        assert rel(lu_det(mat_exp(M)), cmath.exp(np.trace(M))) < 1e-10


def test_eig_small_examples():
    assert eig_small(np.diag([3, 1, 2])).eigenvalues == pytest.approx((3, 2, 1))
    nil = eig_small([[0, 1], [0, 0]])
    assert len(nil) == 2 and all(abs(z) < 1e-12 for z in nil)
    rot = eig_small([[0, -1], [1, 0]])
    assert sorted(rot, key=lambda z: z.imag) == pytest.approx([-1j, 1j])
    with pytest.raises(ValueError):
        eig_small(np.eye(9))


def test_charpoly():
    M = np.array([[2, 1], [0, 3]], dtype=complex)
    assert charpoly(M) == pytest.approx([1, -5, 6])


def test_aberth_known_roots():
    roots = [1.5, -0.5 + 0.25j, 2j, -1, 0.1]
    coeffs = np.poly(roots)
    found = aberth_roots(coeffs)
    assert sorted(found, key=lambda z: (z.real, z.imag)) == pytest.approx(
        sorted(roots, key=lambda z: (complex(z).real, complex(z).imag)), abs=1e-12)


def test_eig_small_vs_numpy_and_ordering():
    rng = np.random.default_rng(21)
    for n in range(1, 9):
        M = unit_disk(rng, n)
        spec = eig_small(M)
        mods = [abs(z) for z in spec]
        assert mods == sorted(mods, reverse=True)
        ref = np.linalg.eigvals(M)
        for z in spec:
            assert np.min(np.abs(ref - z)) < 1e-9
        # residual of the characteristic polynomial
        for z in spec:
            assert abs(np.linalg.det(M - z * np.eye(n))) < 1e-9


def test_regularized_det_examples():
    M = np.array([[0.2, -0.1j], [0.3, 0.5]])
    assert regularized_det(M, 1) == pytest.approx(lu_det(np.eye(2) - M), rel=1e-15)
    a = 0.3 - 0.2j
    assert regularized_det([[a]], 2) == pytest.approx((1 - a) * cmath.exp(a), rel=1e-14)
    N = np.array([[0, 1], [0, 0]], dtype=complex)
    for k in range(1, 7):
        assert regularized_det(N, k) == pytest.approx(1, abs=1e-15)
    with pytest.raises(ValueError):
        regularized_det(M, 0)


def test_regularized_det_matches_series_form():
    # det_k(I - M) = det(I - M) exp(tr sum_{l<k} M^l / l)
    rng = np.random.default_rng(2)
    M = 0.3 * unit_disk(rng, 5)
    for k in range(1, 7):
        series = sum(np.trace(np.linalg.matrix_power(M, l)) / l for l in range(1, k))
        expected = np.linalg.det(np.eye(5) - M) * cmath.exp(series)
        assert rel(regularized_det(M, k), expected) < 1e-12


def test_spectral_examples():
    a = 0.4 + 0.1j
    assert regularized_det_spectral([[a]], 2) == pytest.approx((1 - a) * cmath.exp(a), rel=1e-14)
    a, b = 0.25, -0.5j
    assert regularized_det_spectral(np.diag([a, b]), 1) == pytest.approx((1 - a) * (1 - b), rel=1e-14)
    rng = np.random.default_rng(4)
    M = 0.5 * unit_disk(rng, 4) / 4
    assert rel(regularized_det_spectral(M, 3), regularized_det(M, 3)) < 1e-9


@pytest.mark.parametrize("seed", range(10))
def test_spectral_oracle_agreement(seed):
    for n in (1, 2, 5, 8):
        M = sample_matrix(seed, n, 0.5)
        for k in range(1, 7):
            assert rel(regularized_det(M, k), regularized_det_spectral(M, k)) < 1e-9


floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.tuples(floats, floats), min_size=n * n, max_size=n * n).map(lambda e: (n, e))))
def test_matrix_json_bit_exact(data):
    n, entries = data
    M = np.array([complex(re, im) for re, im in entries]).reshape(n, n)
    back = matrix_from_json_obj(json.loads(json.dumps(matrix_to_json_obj(M))))
    assert back.tobytes() == M.tobytes()


def test_matrix_file_round_trip(tmp_path):
    M = sample_matrix(9, 3, 0.5)
    write_matrix(tmp_path / "m.json", M)
    obj = json.loads((tmp_path / "m.json").read_text())
    assert obj["n"] == 3 and len(obj["entries"]) == 9
    assert np.array_equal(read_matrix(tmp_path / "m.json"), M)


def test_matrix_json_malformed():
    with pytest.raises(ValueError):
        matrix_from_json_obj({"n": 2, "entries": [[1, 0]]})
    with pytest.raises(ValueError):
        matrix_from_json_obj({"entries": []})
