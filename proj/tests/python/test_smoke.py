import json
import math

import numpy as np
import pytest

import _uvstat as uv


def test_basis_values():
    b = uv.BasisSpec.sine_wiener(20)
    assert uv.eval_basis(b, 0, 0.3) == 1.0
    assert abs(uv.eval_basis(b, 1, 1.0) - math.sqrt(2)) < 1e-14
    d = uv.BasisSpec.discrete_signed(10)
    assert uv.eval_basis(d, 2, -2.0) == -2.0
    with pytest.raises(Exception):
        uv.eval_basis(b, 21, 0.0)


def test_orthonormality():
    r = uv.check_orthonormal(uv.BasisSpec.sine_wiener(8), 8, 1e-6)
    assert r["pass"] and r["max_abs_deviation"] < 1e-6
    g = uv.gram_matrix(uv.BasisSpec.discrete_signed(6), 6)
    assert np.allclose(np.asarray(g), np.eye(7), atol=1e-9)


def test_statistics_match_oracles():
    b = uv.BasisSpec.sine_wiener(10)
    k = uv.KernelSpec.eigen_diagonal(b, "wiener", 2)
    p = uv.ProcessSpec.iid("uniform_symmetric", 5)
    path = uv.sample_path(p, 20, 0)
    assert len(path) == 20
    assert abs(uv.u_stat(k, path, 10) - uv.u_stat_naive(k, path)) < 1e-12
    assert abs(uv.v_stat(k, path, 10) - uv.v_stat_naive(k, path)) < 1e-12
    split = uv.adjacent_diagonal_average(k, path, 10) + uv.u_stat_offdiagonal(
        k, path, 10
    )
    assert abs(uv.u_stat(k, path, 10) - split) < 1e-12


def test_tensor_kernels_and_symmetrize():
    b = uv.BasisSpec.sine_wiener(5)
    k = uv.KernelSpec.tensor(b, 2, {(1, 2): 0.7})
    assert not uv.is_symmetric(k)
    s = uv.symmetrize(k)
    assert uv.is_symmetric(s)
    assert uv.tail_mass(k, 1) == 0.7
    assert uv.degeneracy_defect(k, 2, 30, 1) < 1e-10


def test_hermite():
    for x in (-1.5, 0.0, 2.0):
        assert uv.hermite(2, x) == x * x - 1.0
        assert abs(uv.hermite(3, x) - (x**3 - 3 * x)) < 1e-12


def test_covariance_and_limits():
    p = uv.ProcessSpec.one_dependent_shift("uniform_symmetric", 5)
    b = uv.BasisSpec.sine_wiener(4)
    m = uv.build_covariance(p, b, 4, 1, "analytic")
    assert np.allclose(np.asarray(m.sigma), 1.5 * np.eye(4), atol=0)
    assert not m.psd_repaired

    k = uv.KernelSpec.eigen_diagonal(b, "wiener", 2)
    ident = uv.CovarianceModel.identity(4)
    tau = uv.sample_tau(ident, 7, 0)
    assert len(tau) == 4
    u = uv.limit_u_given_tau(k, tau, 4)
    expected = sum(
        (math.pi * (j - 0.5)) ** -2 * (tau[j - 1] ** 2 - 1) for j in range(1, 5)
    )
    assert abs(u - expected) < 1e-12


def test_distances():
    a = [1.0, 2.0, 3.0, 4.0]
    b = [1.5, 2.5, 3.5, 4.5]
    assert abs(uv.ks_two_sample(a, b) - 0.25) < 1e-15
    assert abs(uv.wasserstein1(a, b) - 0.5) < 1e-15


def test_scenarios(tmp_path):
    names = [name for name, _ in uv.list_scenarios()]
    assert "iid_vstat_wiener" in names and len(names) == 6
    r = uv.run_scenario("ortho_check", out=str(tmp_path / "ortho"))
    assert r["exit_code"] == 0 and r["pass"]
    summary = json.loads(r["summary_json"])
    assert summary["scenario"] == "ortho_check"
    assert (tmp_path / "ortho" / "samples.csv").exists()


def test_self_check():
    code, log = uv.self_check()
    assert code == 0
    assert "ok" in log
