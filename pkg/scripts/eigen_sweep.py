#!/usr/bin/env python3
"""Photon-loss sweep of the complex line positions and widths for the first
two ladder rungs, with lossless emitters.

Positions of the first rung merge at gamma_a = 4 sqrt(2) g; the second rung
keeps a pair of lines degenerate in position but distinct in width.

Usage: python scripts/eigen_sweep.py [out_dir]
"""

import sys
from pathlib import Path

from tcladder.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "data/eigen_sweep"
Path(out).mkdir(parents=True, exist_ok=True)

sys.exit(
    main(
        [
            "eigen",
            "--set", "params.gamma_sigma=0.0",
            "--set", "sweep.parameter=gamma_a",
            "--set", "sweep.start=0.0",
            "--set", "sweep.stop=12.0",
            "--set", "sweep.num=241",
            "--set", "manifolds=[1,2]",
            "--out", out,
        ]
    )
)
