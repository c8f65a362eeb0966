"""Smoke test for the mueg_py extension.

Builds the extension with cargo when it is not importable, then exercises
each binding once.  Run from anywhere: ``python3 python/smoke_test.py``.
"""

import importlib
import math
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("mueg_py")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--offline", "--release", "-p", "mueg-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    out = tempfile.mkdtemp(prefix="mueg_py_")
    shutil.copy(os.path.join(ROOT, "target", "release", "libmueg_py.so"), os.path.join(out, "mueg_py.so"))
    sys.path.insert(0, out)
    return importlib.import_module("mueg_py")


def main():
    m = load()

    for d in (1, 2, 3):
        assert abs(m.fermi_kernel(d, 0.7, [0.0] * d) - 0.7) < 1e-12
    assert abs(m.fermi_kernel(3, 0.7, [1.0, 2.0, 0.5])) < 0.7

    rho, j, tau = m.shifted_observables(3, 0.5, [0.2, -0.1, 0.3])
    assert rho == 0.5 and len(j) == 3
    assert sum(c * c for c in j) <= rho * tau

    tf = m.thomas_fermi_constant(3)
    assert abs(tf - 0.6 * (6 * math.pi**2) ** (2 / 3)) < 1e-12

    assert m.indicator_sum([0.123, 0.456, -0.789], 1.0) == 1.0

    rows, p = m.gauge_scan(1.0, [0.0, 0.0, 1.0], [4.0, 8.0, 16.0, 32.0])
    assert len(rows) == 4 and abs(p - 2.0) <= 0.05, p

    ok, line = m.run_criterion(15)
    assert ok, line

    h = m.config_hash("[ueg]\nrho0 = 1\n")
    assert h == m.config_hash("[ueg]\nrho0=1\n") and len(h) == 64
    try:
        m.config_hash("[ueg]\nrho0\n")
    except ValueError as e:
        assert "line 2" in str(e)
    else:
        raise AssertionError("malformed config accepted")

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "f.field")
        with open(path, "w") as f:
            f.write("MUEG-FIELD 1\ndim 1 components 1\n0\n0.5\n4\n1\n2\n3\n4\n")
        dim, comps, cplx, counts, data = m.read_field(path)
        assert (dim, comps, cplx, counts, data) == (1, 1, False, [4], [1.0, 2.0, 3.0, 4.0])

    print("mueg_py smoke test passed")


if __name__ == "__main__":
    main()
