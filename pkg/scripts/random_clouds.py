"""Eigenvalue clouds of the random chains, with the short-word Bloch curves on top.

Writes model_b.svg (random phases, fills the disk), model_a.svg (random signs,
ensemble of seeds), and two overlays: the {++-} curve over one model-A sample
and the union of all non-trivial words of length <= 4.
"""
import numpy as np

from _common import out_dir
from fzspectrum import HamiltonianSpec, RandomPhase, RandomSign, bloch_curve, eigenvalues_qr, support_union
from fzspectrum.svg import Layer, PlotSpec, render_svg
from fzspectrum.words import Word, necklaces

out, quick = out_dir(__doc__)
n = 299 if quick else 999
reps = 5 if quick else 30

b = eigenvalues_qr(HamiltonianSpec(n, RandomPhase(7))).eigenvalues
render_svg(PlotSpec([Layer(b, "cloud", "model B")], title=f"model B, N+1={n + 1}")).save(out / "model_b.svg")
print(f"model B: max |lambda| = {np.abs(b).max():.4f}")

cloud = np.concatenate([eigenvalues_qr(HamiltonianSpec(n, RandomSign(s))).eigenvalues for s in range(reps)])
render_svg(PlotSpec([Layer(cloud, "cloud", "model A")], title=f"model A, {reps} samples")).save(out / "model_a.svg")

one = cloud[: n + 1]
curve = bloch_curve(Word.parse("++-"))
render_svg(PlotSpec([Layer(one, "cloud"), Layer(curve.points(), "curve", "++-")])).save(out / "overlay_ppm.svg")

short = [w for L in range(2, 5) for w in necklaces(L, primitive_only=True, mixed_only=True)]
union = support_union([bloch_curve(w, 1024) for w in short])
render_svg(PlotSpec([Layer(one, "cloud"), Layer(union.points(), "curve", "L<=4")])).save(out / "overlay_short.svg")
print(f"{len(short)} words of length <= 4: {', '.join(map(str, short))}")
