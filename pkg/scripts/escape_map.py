"""Escape fraction of the ratio recursion over the plane, with model-A eigenvalues on top.

Cells where |y| runs past y_max are candidates for the support; the dark
region should sit under the eigenvalue cloud.
"""
import time

import numpy as np

from _common import out_dir
from fzspectrum import HamiltonianSpec, RandomSign, eigenvalues_qr
from fzspectrum.dyson_schmidt import DSConfig, GridSpec, escape_map
from fzspectrum.svg import Layer, render_heatmap
from fzspectrum.tables import write_map_csv

out, quick = out_dir(__doc__)
nx = 48 if quick else 128
grid = GridSpec(-2.2, 2.2, -2.2, 2.2, nx, nx)
cfg = DSConfig(0, burn_in=500, samples=5000 if quick else 20000, y_max=1e2, trajectories=4, seed=3)
t0 = time.perf_counter()
lmap = escape_map(grid, cfg)
print(f"{nx}x{nx} map in {time.perf_counter() - t0:.1f}s; escaping cells: {np.mean(lmap.escape_fraction > 0):.1%}")
write_map_csv(out / "escape_map.csv", lmap)
cloud = eigenvalues_qr(HamiltonianSpec(499, RandomSign(1))).eigenvalues
render_heatmap(lmap, [Layer(cloud, "cloud", "model A")]).save(out / "escape_map.svg")
render_heatmap(lmap, field_name="gamma").save(out / "gamma_map.svg")
