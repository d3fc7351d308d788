"""Average decoded bits against the controller's basis angle.

Sweeps theta over [0, pi/4] for the four five-qubit channels and writes a CSV
next to this script, alongside a coarse text plot.
"""

import math
from pathlib import Path

import numpy as np

from clustercorr import protocols

grid = np.linspace(0, math.pi / 4, 21)
rows = protocols.info_sweep(["psi5", "phi5", "ghz5", "varphi5"], grid, "C-A")
out = Path(__file__).with_name("dense_coding_sweep.csv")
out.write_text(protocols.sweep_csv(rows))
print(f"wrote {len(rows)} rows to {out}")

for kind in ("psi5", "phi5", "ghz5", "varphi5"):
    print(f"\n{kind}")
    for channel, theta, bits, p0, p1 in rows:
        if channel == kind:
            bar = "#" * int(round((bits - 1.5) * 12))
            print(f"  theta={theta:.3f}  {bits:.4f} bits  {bar}")

print(f"\ndirect five-bit coding: {protocols.direct_dense_run(1).average_bits:.6f} bits")
