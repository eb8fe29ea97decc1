"""A chain built from two words, 100 copies each, against the union of their curves."""
import numpy as np

from _common import out_dir
from fzspectrum import HamiltonianSpec, bloch_curve, distance_to_support, eigenvalues_qr, support_union
from fzspectrum.direct import ParagraphSource
from fzspectrum.svg import Layer, PlotSpec, render_svg
from fzspectrum.words import Paragraph, Word

out, quick = out_dir(__doc__)
reps = 40 if quick else 100
par = Paragraph.parse(f"++--:{reps},+++-:{reps}")
union = support_union([bloch_curve(Word.parse("++--")), bloch_curve(Word.parse("+++-"))])
ev = eigenvalues_qr(HamiltonianSpec(par.total_length, ParagraphSource(par))).eigenvalues
d = distance_to_support(ev, union)
for tol in (0.01, 0.02, 0.05):
    print(f"within {tol}: {np.mean(d <= tol):.2%} of {len(ev)}")
render_svg(PlotSpec([Layer(union.points(), "curve", union.label), Layer(ev, "cloud", str(par))])).save(out / "superposition.svg")
