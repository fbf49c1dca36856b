"""The jitted stencil kernel and the numpy fallback compute the same thing."""

import numpy as np
import pytest

from pcapflow import _kernels


def _random_problem(rng, n=24):
    u = rng.normal(size=(n, n, n))
    diag = rng.uniform(1.0, 2.0, size=(n, n, n))
    cx = rng.uniform(0.0, 1.0, size=(n - 1, n, n))
    cy = rng.uniform(0.0, 1.0, size=(n, n - 1, n))
    cz = rng.uniform(0.0, 1.0, size=(n, n, n - 1))
    return u, diag, cx, cy, cz


def test_backends_agree():
    rng = np.random.default_rng(4)
    u, diag, cx, cy, cz = _random_problem(rng)
    out_active = np.empty_like(u)
    out_numpy = np.empty_like(u)
    _kernels.stencil_apply(u, diag, cx, cy, cz, out_active)
    _kernels._stencil_apply_numpy(u, diag, cx, cy, cz, out_numpy)
    assert np.allclose(out_active, out_numpy, rtol=1e-13, atol=1e-13)


def test_matvec_is_symmetric():
    # <Au, v> == <u, Av> for the face-coefficient stencil
    rng = np.random.default_rng(5)
    u, diag, cx, cy, cz = _random_problem(rng, n=16)
    v = rng.normal(size=u.shape)
    Au = np.empty_like(u)
    Av = np.empty_like(u)
    _kernels.stencil_apply(u, diag, cx, cy, cz, Au)
    _kernels.stencil_apply(v, diag, cx, cy, cz, Av)
    np.testing.assert_allclose(_kernels.dot(Au, v), _kernels.dot(u, Av), rtol=1e-12)


def test_dot_deterministic():
    rng = np.random.default_rng(6)
    a = rng.normal(size=1000)
    b = rng.normal(size=1000)
    assert _kernels.dot(a, b) == _kernels.dot(a.copy(), b.copy())


def test_backend_name():
    assert _kernels.backend_name() in ("numba", "numpy")


def test_env_flag_selects_numpy_fallback(tmp_path):
    # a full (small) solve agrees across backends, bitwise inputs aside
    import os
    import subprocess
    import sys
    script = tmp_path / "run.py"
    script.write_text(
        "import numpy as np\n"
        "from pcapflow import MetricSpec, _kernels\n"
        "from pcapflow.epsilon import GridConfig, solve_regularized\n"
        "print('backend', _kernels.backend_name())\n"
        "f = solve_regularized(MetricSpec.flat(1.0), 2.0, 1e-3,\n"
        "                      GridConfig(r_in=1.0, r_out=2.0, h=0.125, T=0.4))\n"
        "print('checksum', repr(float(np.sum(f.u))))\n")
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, PCAPFLOW_NO_NUMBA=flag)
        res = subprocess.run([sys.executable, str(script)], env=env,
                             capture_output=True, text=True, timeout=300)
        assert res.returncode == 0, res.stderr
        outs[flag] = res.stdout
    assert "backend numpy" in outs["1"]
    check = [l for l in outs["0"].splitlines() if l.startswith("checksum")]
    check_np = [l for l in outs["1"].splitlines() if l.startswith("checksum")]
    v0 = float(check[0].split()[1])
    v1 = float(check_np[0].split()[1])
    assert v0 == pytest.approx(v1, rel=1e-12)
