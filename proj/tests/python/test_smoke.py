import math

import numpy as np
import pytest

import nearcommute as nc


def test_operator_norm_and_commutator():
    z = np.diag([1.0, -1.0]).astype(complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    assert nc.operator_norm(nc.commutator(z, x)) == pytest.approx(2.0)


def test_herm_exp_is_unitary():
    h = np.array([[1.0, 0.5j], [-0.5j, -2.0]])
    u = nc.herm_exp(h)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-13)


def test_gapped_log_matches_direct_log():
    u = nc.gen_gapped_unitary(12, 0.8, 3)
    h, coeffs = nc.gapped_log(u, 0.4)
    assert np.linalg.norm(h - nc.direct_log(u), 2) <= coeffs["tail"]
    assert coeffs["coeffs"][coeffs["order"]] == pytest.approx(math.pi)


def test_pipeline_round_trip():
    u, v, eps = nc.gen_almost_commuting_pair(8, 1.0, 1e-3, seed=1)
    r = nc.near_commuting_unitaries(u, v)
    assert r["checks_passed"]
    x, y = r["x"], r["y"]
    assert np.linalg.norm(x @ y - y @ x, 2) <= 1e-9
    assert r["dist_u"] == pytest.approx(np.linalg.norm(u - x, 2), rel=1e-8)


def test_gap_rejection():
    c, s = nc.gen_voiculescu_pair(16)
    assert nc.operator_norm(nc.commutator(c, s)) == pytest.approx(2 * math.sin(math.pi / 16), abs=1e-12)
    with pytest.raises(nc.PreconditionError):
        nc.near_commuting_unitaries(c, s, min_gap=0.3)


def test_mtxc_text_round_trip():
    m = np.array([[1 + 2j, -0.1], [3e-300, 1j]])
    assert np.array_equal(nc.parse_mtxc(nc.format_mtxc(m)), m)
    with pytest.raises(nc.InvalidInput):
        nc.parse_mtxc("MTXC 1 2\n1 0\n")
