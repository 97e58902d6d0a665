#!/usr/bin/env python3
"""Strong-coupling boundary map: the contour where the splitting of rung n
closes as a function of gamma_-/g, next to the actual Rabi splittings of the
first four rungs.

Usage: python scripts/criterion_map.py [out_dir]
"""

import sys
from pathlib import Path

from tcladder.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "data/criterion_map"
Path(out).mkdir(parents=True, exist_ok=True)

sys.exit(main(["criterion", "--set", "manifolds=[1,2,3,4]", "--out", out]))
