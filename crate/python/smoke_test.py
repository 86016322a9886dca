#!/usr/bin/env python3
"""Smoke test for the barscan Python extension.

Builds nothing itself: expects `cargo build -p barscan-py` to have produced
target/debug/libbarscan.so (or .dylib/.dll). Copies the library next to a
temp dir under the importable name `barscan` and exercises the API.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_library() -> Path:
    candidates = []
    for profile in ("debug", "release"):
        base = REPO / "target" / profile
        candidates += [
            base / "libbarscan.so",
            base / "libbarscan.dylib",
            base / "barscan.dll",
        ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("extension not found; run `cargo build -p barscan-py` first")


def main() -> None:
    lib = locate_library()
    tmp = Path(tempfile.mkdtemp(prefix="barscan-smoke-"))
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy(lib, tmp / f"barscan{suffix}")
    sys.path.insert(0, str(tmp))
    import barscan

    # Symbology round trip.
    digits = "036912581470"
    bars = barscan.encode(digits)
    assert len(bars) == 95 and set(bars) <= {"0", "1"}
    assert bars.startswith("101") and bars.endswith("101")
    sparse = barscan.digits_to_sparse(digits)
    assert len(sparse) == 123 and sum(sparse) == 15
    assert barscan.sparse_to_digits(sparse) == digits

    # Forward model and noiseless decode.
    samples = barscan.synthesize(digits, sigma=0.45, alpha=1.0, r=10)
    assert len(samples) == 950
    result = barscan.decode(samples, r=10, sigma_hat=0.45, alpha_hat=1.0)
    assert result.digits == digits, result.digits
    assert result.step_residual_l1[-1] < 1e-9

    # Noisy decode with amplitude estimation.
    noise = barscan.relative_noise(samples, r=10, nu=0.1, seed=7)
    ratio = math.sqrt(sum(v * v for v in noise) / sum(v * v for v in samples))
    assert abs(ratio - 0.1) < 1e-12
    noisy = [s + n for s, n in zip(samples, noise)]
    result = barscan.decode(noisy, r=10, sigma_hat=0.45)
    assert result.digits == digits, result.digits
    assert 0.5 < result.alpha < 2.0

    # Determinism of the noise draws.
    again = barscan.absolute_noise(950, xi=0.3, seed=7)
    assert again == barscan.absolute_noise(950, xi=0.3, seed=7)

    # Diagnostics and bounds.
    diag = barscan.diagnostics(sigma=0.0, alpha=1.0, r=10)
    assert diag.epsilon == 0.0 and diag.mu == 20.0 and diag.recovery_guaranteed
    assert abs(barscan.noise_ceiling(0.0, 1.0, 10) - 10.0) < 1e-12
    b, j1, gbound = barscan.sigma_bound(0.425, 0.6, r=10)
    assert b > 0 and j1 >= 1 and abs(gbound - 70 * b) < 1e-12
    assert barscan.sigma_bound(0.5, 0.5)[0] == 0.0

    # A tiny phase diagram; matched noiseless cell must always succeed.
    pd = barscan.phase_diagram(
        sigma=0.45, alpha=1.0, r=5,
        sigma_hat=[0.45, 0.6], nu=[0.0, 0.1], trials=5, seed=11,
    )
    assert pd.probability(0, 0) == 1.0
    assert pd.csv().startswith("sigma_hat,axis2,successes,trials,probability")

    print("smoke test passed")


if __name__ == "__main__":
    main()
