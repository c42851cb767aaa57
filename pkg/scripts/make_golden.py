"""Regenerate tests/golden/vacuum_amplitude.json with 40-digit arithmetic (needs mpmath)."""
import json
from pathlib import Path

import mpmath

mpmath.mp.dps = 40
HBAR = mpmath.mpf("1.054571817e-34")
F, V, EPS = mpmath.mpf("11.77355e9"), mpmath.mpf("1e-5"), mpmath.mpf(10)

val = mpmath.sqrt(2 * mpmath.pi * HBAR * 2 * mpmath.pi * F / (V * EPS))
out = Path(__file__).resolve().parents[1] / "tests" / "golden" / "vacuum_amplitude.json"
out.write_text(json.dumps({
    "freq_hz": 11.77355e9, "mode_volume_m3": 1e-5, "epsilon": 10.0, "hbar_js": 1.054571817e-34,
    "amplitude": mpmath.nstr(val, 20), "source": "mpmath, 40 digits",
}, indent=2) + "\n")
print(out, val)
