"""Periodic chains against their Bloch curves, and a single-letter defect.

For {++-} the finite-chain eigenvalues approach the curve as N grows; the
table printed at the end shows the 99th-percentile distance.  The corrupted
word (++-)^16 +++ (++-)^16 keeps a pair of eigenvalues off the curve.
"""
import numpy as np

from _common import out_dir
from fzspectrum import HamiltonianSpec, Periodic, bloch_curve, distance_to_support, eigenvalues_qr
from fzspectrum.direct import ParagraphSource
from fzspectrum.svg import Layer, PlotSpec, render_svg
from fzspectrum.tables import write_curve_csv
from fzspectrum.words import Paragraph, Word

out, quick = out_dir(__doc__)
sizes = (101, 301) if quick else (301, 601, 901, 1501)

for text in ("++-", "+++-"):
    s = bloch_curve(Word.parse(text))
    write_curve_csv(out / f"curve_{text}.csv", s)
    layers = [Layer(s.points(), "curve", text), Layer(s.endpoints, "endpoints")]
    if len(s.isolated.points):
        layers.append(Layer(s.isolated.points, "isolated"))
    render_svg(PlotSpec(layers, title=f"Bloch curve {text}")).save(out / f"curve_{text}.svg")

w = Word.parse("++-")
curve = bloch_curve(w)
print("N+1    p99 distance   max distance")
for size in sizes:
    ev = eigenvalues_qr(HamiltonianSpec(size - 1, Periodic(w))).eigenvalues
    d = distance_to_support(ev, curve)
    print(f"{size:<6} {np.percentile(d, 99):<14.5f} {d.max():.5f}")

par = Paragraph.parse("++-:16,+++:1,++-:16")
ev = eigenvalues_qr(HamiltonianSpec(par.total_length, ParagraphSource(par))).eigenvalues
d = distance_to_support(ev, curve)
far = ev[d > 0.1]
print(f"corrupted word: {len(ev)} eigenvalues, {len(far)} farther than 0.1 from the curve: {np.round(far, 6)}")
render_svg(PlotSpec([Layer(curve.points(), "curve"), Layer(ev, "cloud", "corrupted")])).save(out / "corrupted.svg")
