#!/usr/bin/env python3
"""Build-and-import smoke test for the `lpx` Python extension module.

Builds the cdylib with cargo, copies it next to a temp dir as `lpx.so`
(`.dylib` handled on macOS), imports it, and exercises the main surface:
classification, Satake evaluation, temperedness, generation, realization,
and a couple of report invariants.

Run from anywhere:  python3 python/smoke_test.py
"""

import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_module(workdir: Path) -> None:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "lpx-py"],
        cwd=ROOT,
        check=True,
    )
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    candidates = [
        ROOT / "target" / "release" / "liblpx.so",
        ROOT / "target" / "release" / "liblpx.dylib",
        ROOT / "target" / "release" / "lpx.dll",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("could not find the built lpx cdylib under target/release")
    shutil.copy2(built, workdir / f"lpx{suffix}")
    sys.path.insert(0, str(workdir))


def petersen_text() -> str:
    lines = []
    for i in range(5):
        lines.append(f"{i} {(i + 1) % 5}")
        lines.append(f"{5 + i} {5 + (i + 2) % 5}")
        lines.append(f"{i} {5 + i}")
    return "\n".join(lines) + "\n"


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="lpx-smoke-"))
    build_module(workdir)
    import lpx  # noqa: E402

    # Graph construction and classification.
    g = lpx.Graph(petersen_text())
    assert g.n == 10 and g.m == 15, (g.n, g.m)
    assert "regular" in g.classification()
    assert g.degree(0) == 3 and len(g.neighbors(0)) == 3

    report = g.analyze()
    assert report["ramanujan"] is True
    assert abs(report["p_star"] - 2.0) < 1e-6
    assert abs(report["lambda_x"] - 2.0) < 1e-9
    assert len(report["nb_spectrum"]) == 30

    spectrum = g.spectrum()
    assert abs(spectrum[-1][0] - 3.0) < 1e-9 and spectrum[-1][1] == 1

    # Biregular route.
    k23 = lpx.Graph("0 3\n0 4\n1 3\n1 4\n2 3\n2 4\n")
    rep = k23.analyze()
    assert rep["ramanujan"] is False
    assert rep["zero_multiplicity"] == 3
    assert rep["expected_zero_multiplicity"] == 1

    # Rejected inputs raise ValueError.
    try:
        lpx.Graph("0 0\n")
    except ValueError as e:
        assert "self-loop" in str(e)
    else:
        sys.exit("self-loop must be rejected")

    # Satake evaluation: A_2(1+i) = 1 for q = 2; A_k(q) is the sphere size.
    assert abs(lpx.eval_ak(1 + 1j, 2, 2) - 1.0) < 1e-12
    assert abs(lpx.eval_ak(2 + 0j, 3, 2) - 12.0) < 1e-12
    assert lpx.satake_ak_str(2, 2) == "t^2 + 1 + 4*t^-2"
    assert lpx.hecke_symbolic_ok(8, 3)

    # Temperedness: the tempered circle gives p* = 2, the trivial point inf.
    dom, p_star = lpx.temperedness(complex(0, math.sqrt(2)), 2)
    assert abs(dom - math.sqrt(2)) < 1e-12 and p_star == 2.0
    _, p_star = lpx.temperedness(2 + 0j, 2)
    assert p_star == math.inf

    # Generation is deterministic per seed and self-consistent.
    text = lpx.gen_regular(10, 3, 1)
    assert text == lpx.gen_regular(10, 3, 1)
    g2 = lpx.Graph(text)
    assert g2.n == 10 and "regular" in g2.classification()

    # Realization on the covering tree: θ = √2 is 3-finite for q = 2.
    k4 = "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"
    r = lpx.realize(k4, complex(math.sqrt(2), 0), 3.0, radius=10)
    assert r["analytic_p_finite"] is True and r["consistent"] is True
    assert r["growth_exponent"] < 0

    # Relation suite: exact residuals on K4.
    rel = lpx.relation_report(k4)
    assert rel["pass"] is True
    assert all(c["exact"] and c["residual"] == 0 for c in rel["checks"])

    print("smoke test passed")


if __name__ == "__main__":
    main()
