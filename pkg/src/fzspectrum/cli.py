"""Command-line front end: ``fzspectrum <command> ...``.

Exit codes: 0 success, 2 usage or invalid input, 3 numerical failure, 4 I/O.
A ``--config FILE`` of ``key=value`` lines supplies defaults; explicit flags win.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .direct import (
    HamiltonianSpec, ParagraphSource, Periodic, RandomPhase, RandomSign,
    eigenvalues_qr, eigenvalues_via_roots,
)
from .dyson_schmidt import DSConfig, GridSpec, escape_map
from .errors import (
    ConvergenceError, DataFormatError, DegenerateMapError, FZError, InsufficientWordsError,
    InvalidArgumentError, SingularGaugeError, UnsupportedLengthError,
)
from .svg import DEFAULT_VIEWPORT, STYLES, Layer, PlotSpec, render_heatmap, render_svg
from .tables import read_points_csv, write_curve_csv, write_eigen_csv, write_json, write_map_csv
from .word_spectrum import bloch_curve, pqr, q_closed_form, support_union
from .words import Paragraph, Word, cyclic_invariants, enumerate_words, necklaces

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
MAX_SEED = 2**64


class UsageError(InvalidArgumentError):
    pass


@dataclass
class RunConfig:
    """Everything a command needs, checked for consistency before dispatch."""

    command: str
    word: str | None = None
    paragraph: str | None = None
    n: int | None = None
    seed: int = 0
    model: str | None = None
    realizations: int = 1
    solver: str = "qr"
    theta_steps: int = 2048
    bounds: tuple = DEFAULT_VIEWPORT
    nx: int = 128
    ny: int = 128
    stream: str = "random_sign"
    samples: int = 10_000
    burn_in: int = 1000
    y_max: float = 1e8
    trajectories: int = 1
    out: str = "fzspectrum"
    format: str = "csv"
    svg: str | None = None
    threads: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self) -> RunConfig:
        if not 0 <= self.seed < MAX_SEED:
            raise UsageError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.format not in ("csv", "json", "svg"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.command == "spectrum random":
            if self.model not in ("A", "B"):
                raise UsageError("--model must be A or B")
            if self.model == "B" and (self.word or self.paragraph):
                raise UsageError("model B draws random phases; it cannot be combined with a word or paragraph source")
            if self.n is None or self.n < 1:
                raise UsageError("--n must be >= 1")
            if self.realizations < 1:
                raise UsageError("--realizations must be >= 1")
            if self.solver not in ("qr", "lapack", "roots"):
                raise UsageError(f"unknown solver {self.solver!r}")
        if self.command in ("spectrum word", "spectrum sentence") and self.theta_steps < 8:
            raise UsageError("--theta-steps must be >= 8")
        if self.command == "spectrum word" and not self.word:
            raise UsageError("--word is required")
        if self.command == "spectrum sentence" and not self.paragraph:
            raise UsageError("--paragraph is required")
        if self.command == "escape-map":
            x0, x1, y0, y1 = self.bounds
            if not (x0 <= x1 and y0 <= y1):
                raise UsageError(f"bad bounds {self.bounds}")
        return self


# argument parsing --------------------------------------------------------------------


def _bounds(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bounds must be four numbers, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"bounds must be re_min,re_max,im_min,im_max; got {text!r}")
    return vals


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64), got {text}")
    return v


def _outputs(p):
    p.add_argument("--out", default="fzspectrum", help="output path prefix")
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv",
                   help="csv: table plus JSON metadata; json: one JSON file; svg: plot only")
    p.add_argument("--svg", default=None, help="also write an SVG plot to this path")
    p.add_argument("--threads", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="fzspectrum", description="Spectra of random and periodic non-Hermitian hopping chains.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", default=None, help="key=value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)
    leaves = {}

    words = sub.add_parser("words", help="word enumeration").add_subparsers(dest="words_command", required=True)
    p = words.add_parser("enumerate", help="list binary words of a given length")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--necklaces", action="store_true", help="one representative per rotation class")
    p.add_argument("--primitive", action="store_true", help="drop powers of shorter words")
    p.add_argument("--mixed", action="store_true", help="drop single-sign words")
    p.add_argument("--out", default=None, help="write to this file instead of stdout")
    leaves["words enumerate"] = p

    p = sub.add_parser("qpoly", help="P, Q, R polynomials of a word")
    p.add_argument("--word", required=True)
    p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    leaves["qpoly"] = p

    spectrum = sub.add_parser("spectrum", help="spectra").add_subparsers(dest="spectrum_command", required=True)
    p = spectrum.add_parser("word", help="Bloch curves of a periodic word")
    p.add_argument("--word", required=True)
    p.add_argument("--theta-steps", type=int, default=2048)
    p.add_argument("--n", type=int, default=None, help="also diagonalize the finite periodic chain with N letters")
    _outputs(p)
    leaves["spectrum word"] = p

    p = spectrum.add_parser("sentence", help="superposed spectra of a paragraph's words")
    p.add_argument("--paragraph", required=True, help='e.g. "++--:100,+++-:100"')
    p.add_argument("--theta-steps", type=int, default=2048)
    p.add_argument("--n", type=int, default=None, help="also diagonalize the finite chain with N letters")
    _outputs(p)
    leaves["spectrum sentence"] = p

    p = spectrum.add_parser("random", help="eigenvalues of random chains")
    p.add_argument("--model", choices=("A", "B"), required=True)
    p.add_argument("--n", type=int, required=True, help="number of letters; the matrix is (N+1)x(N+1)")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--realizations", type=int, default=1, help="seeds seed, seed+1, ...")
    p.add_argument("--solver", choices=("qr", "lapack", "roots"), default="qr")
    _outputs(p)
    leaves["spectrum random"] = p

    p = sub.add_parser("escape-map", help="ratio-iteration escape statistics over a grid (candidate support)")
    p.add_argument("--bounds", type=_bounds, default=DEFAULT_VIEWPORT, help="re_min,re_max,im_min,im_max; write --bounds=-3,3,-1,1 when the first value is negative")
    p.add_argument("--grid", type=int, default=None, help="square grid resolution")
    p.add_argument("--nx", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    p.add_argument("--stream", default="random_sign", help="random_sign, random_phase or a word such as ++-")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--y-max", type=float, default=1e8)
    p.add_argument("--trajectories", type=int, default=1)
    p.add_argument("--seed", type=_seed, default=0)
    _outputs(p)
    leaves["escape-map"] = p

    p = sub.add_parser("overlay", help="layered SVG of CSV point files")
    p.add_argument("layers", nargs="+", help="PATH or PATH:STYLE, style one of " + ", ".join(STYLES))
    p.add_argument("--out", required=True, help="SVG path")
    p.add_argument("--viewport", type=_bounds, default=DEFAULT_VIEWPORT)
    p.add_argument("--size", type=int, default=800)
    leaves["overlay"] = p
    return parser, leaves


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise DataFormatError(f"expected key=value, got {raw.strip()!r}", path, lineno)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _apply_config(leaves, cfg: dict):
    known = set()
    for p in leaves.values():
        dests = {a.dest for a in p._actions}
        keys = {k: v for k, v in cfg.items() if k in dests}
        known |= set(keys)
        if keys:
            p.set_defaults(**keys)
    unknown = set(cfg) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")


def parse_args(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, leaves = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    cfg = {}
    if known.config:
        cfg = read_config_file(known.config)
        _apply_config(leaves, cfg)
    args = parser.parse_args(argv)
    args.config_values = cfg
    return args


def run_config(args) -> RunConfig:
    command = args.command
    if command == "spectrum":
        command = f"spectrum {args.spectrum_command}"
    elif command == "words":
        command = f"words {args.words_command}"
    fields = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__ and k != "command"}
    # config keys the chosen command has no flag for still take part in validation
    for k, v in getattr(args, "config_values", {}).items():
        if k in RunConfig.__dataclass_fields__ and k not in vars(args):
            fields[k] = v
    if getattr(args, "grid", None):
        fields["nx"] = fields["ny"] = args.grid
    if getattr(args, "out", None) is None:
        fields.pop("out", None)
    cfg = RunConfig(command=command, **fields)
    return cfg.validate()


# commands -------------------------------------------------------------------------------


def _say(msg):
    print(msg)


def cmd_words_enumerate(args, cfg):
    if (args.primitive or args.mixed) and not args.necklaces:
        raise UsageError("--primitive and --mixed apply to --necklaces")
    if args.necklaces:
        words = necklaces(args.length, primitive_only=args.primitive, mixed_only=args.mixed)
    else:
        words = enumerate_words(args.length)
    text = "".join(f"{w}\n" for w in words)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        _say(f"wrote {len(words)} words to {args.out}")
    else:
        sys.stdout.write(text)


def cmd_qpoly(args, cfg):
    w = Word.parse(args.word)
    res = pqr(w)
    payload = {
        "word": str(w),
        "L": len(w),
        "P": res.P.to_text(),
        "Q": res.Q.to_text(),
        "R": res.R.to_text(),
    }
    if 2 <= len(w) <= 7:
        payload["closed_form_matches"] = q_closed_form(len(w), cyclic_invariants(w)) == res.Q
    if args.out:
        write_json(args.out, payload)
        _say(f"wrote {args.out}")
    else:
        for k in ("word", "L", "P", "Q", "R", "closed_form_matches"):
            if k in payload:
                _say(f"{k}: {payload[k]}")


def _finite_chain(source, n, cfg) -> list:
    if n is None:
        return []
    spec = HamiltonianSpec(n, source)
    return [eigenvalues_qr(spec)]


def _spectrum_layers(spectrum, eigs):
    layers = []
    if eigs:
        layers.append(Layer(np.concatenate([e.eigenvalues for e in eigs]), "cloud", "eigenvalues"))
    layers.append(Layer(spectrum.points(), "curve", spectrum.label))
    layers.append(Layer(spectrum.endpoints, "endpoints", "endpoints"))
    members = getattr(spectrum, "members", [spectrum])
    poles = np.concatenate([m.isolated.poles for m in members])
    isolated = np.concatenate([m.isolated.points for m in members])
    layers.append(Layer(poles, "poles", "poles"))
    layers.append(Layer(isolated, "isolated", "isolated points"))
    return layers


def _emit_spectrum(cfg, spectrum, eigs, metadata):
    written = []
    if cfg.format == "csv":
        path = f"{cfg.out}.csv"
        n = write_curve_csv(path, spectrum)
        written.append((path, n))
        if eigs:
            epath = f"{cfg.out}_eigs.csv"
            written.append((epath, write_eigen_csv(epath, eigs)))
        jpath = f"{cfg.out}.json"
        write_json(jpath, metadata)
        written.append((jpath, None))
    elif cfg.format == "json":
        jpath = f"{cfg.out}.json"
        payload = dict(metadata)
        payload["points"] = spectrum.points()
        if eigs:
            payload["eigenvalues"] = np.concatenate([e.eigenvalues for e in eigs])
        write_json(jpath, payload)
        written.append((jpath, None))
    svg_paths = [cfg.svg] if cfg.svg else []
    if cfg.format == "svg":
        svg_paths.append(f"{cfg.out}.svg")
    for path in svg_paths:
        r = render_svg(PlotSpec(_spectrum_layers(spectrum, eigs), title=spectrum.label))
        r.save(path)
        written.append((path, None))
        _say(f"clamped points: {r.clamped}")
    for path, n in written:
        _say(f"wrote {path}" + (f" ({n} rows)" if n is not None else ""))


def cmd_spectrum_word(args, cfg):
    w = Word.parse(cfg.word)
    spectrum = bloch_curve(w, cfg.theta_steps)
    eigs = _finite_chain(Periodic(w), cfg.n, cfg)
    meta = spectrum.metadata()
    meta["config"] = _config_dict(cfg)
    _emit_spectrum(cfg, spectrum, eigs, meta)


def cmd_spectrum_sentence(args, cfg):
    par = Paragraph.parse(cfg.paragraph)
    words = list(dict.fromkeys(w for w, _ in par.segments))
    spectrum = support_union([bloch_curve(w, cfg.theta_steps) for w in words])
    eigs = _finite_chain(ParagraphSource(par), cfg.n, cfg)
    meta = {"paragraph": str(par), "members": spectrum.metadata(), "config": _config_dict(cfg)}
    _emit_spectrum(cfg, spectrum, eigs, meta)


def _solve(spec, solver):
    if solver == "roots":
        return eigenvalues_via_roots(spec)
    return eigenvalues_qr(spec, method="lapack" if solver == "lapack" else "auto")


def cmd_spectrum_random(args, cfg):
    cls = RandomSign if cfg.model == "A" else RandomPhase
    specs = [HamiltonianSpec(cfg.n, cls((cfg.seed + i) % MAX_SEED)) for i in range(cfg.realizations)]
    if cfg.threads > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            results = list(ex.map(lambda s: _solve(s, cfg.solver), specs))
    else:
        results = [_solve(s, cfg.solver) for s in specs]
    written = []
    if cfg.format == "csv":
        path = f"{cfg.out}.csv"
        written.append((path, write_eigen_csv(path, results)))
        jpath = f"{cfg.out}.json"
        write_json(jpath, {"config": _config_dict(cfg), "seeds": [s.seed for s in specs],
                           "iterations": [r.iterations for r in results]})
        written.append((jpath, None))
    elif cfg.format == "json":
        jpath = f"{cfg.out}.json"
        write_json(jpath, {"config": _config_dict(cfg),
                           "realizations": [{"seed": r.spec.seed, "eigenvalues": r.eigenvalues} for r in results]})
        written.append((jpath, None))
    svg_paths = [cfg.svg] if cfg.svg else []
    if cfg.format == "svg":
        svg_paths.append(f"{cfg.out}.svg")
    for path in svg_paths:
        pts = np.concatenate([r.eigenvalues for r in results])
        r = render_svg(PlotSpec([Layer(pts, "cloud", f"model {cfg.model}")], title=f"model {cfg.model}, N={cfg.n}"))
        r.save(path)
        written.append((path, None))
        _say(f"clamped points: {r.clamped}")
    for path, n in written:
        _say(f"wrote {path}" + (f" ({n} rows)" if n is not None else ""))


def cmd_escape_map(args, cfg):
    grid = GridSpec(*cfg.bounds, nx=cfg.nx, ny=cfg.ny)
    ds = DSConfig(0j, cfg.burn_in, cfg.samples, cfg.y_max, cfg.stream, cfg.seed, cfg.trajectories)
    lmap = escape_map(grid, ds, threads=cfg.threads)
    written = []
    if cfg.format == "csv":
        path = f"{cfg.out}.csv"
        written.append((path, write_map_csv(path, lmap)))
        jpath = f"{cfg.out}.json"
        write_json(jpath, {"label": lmap.label, "config": _config_dict(cfg)})
        written.append((jpath, None))
    elif cfg.format == "json":
        jpath = f"{cfg.out}.json"
        write_json(jpath, {"label": lmap.label, "config": _config_dict(cfg), "re": grid.re, "im": grid.im,
                           "gamma": lmap.gamma, "escape_fraction": lmap.escape_fraction})
        written.append((jpath, None))
    svg_path = cfg.svg or f"{cfg.out}.svg"
    render_heatmap(lmap).save(svg_path)
    written.append((svg_path, None))
    for path, n in written:
        _say(f"wrote {path}" + (f" ({n} rows)" if n is not None else ""))
    _say(f"cells with excursions: {int((lmap.escape_fraction > 0).sum())} of {lmap.escape_fraction.size}")


def _layer_arg(text):
    path, style = text, "cloud"
    head, sep, tail = text.rpartition(":")
    if sep and tail in STYLES:
        path, style = head, tail
    return path, style


def cmd_overlay(args, cfg):
    layers = []
    for item in args.layers:
        path, style = _layer_arg(item)
        table = read_points_csv(path)
        layers.append(Layer(table.points, style, path))
    r = render_svg(PlotSpec(layers, viewport=args.viewport, size=args.size))
    r.save(args.out)
    _say(f"wrote {args.out} ({sum(len(layer.points) for layer in layers)} points, clamped points: {r.clamped})")


COMMANDS = {
    "words enumerate": cmd_words_enumerate,
    "qpoly": cmd_qpoly,
    "spectrum word": cmd_spectrum_word,
    "spectrum sentence": cmd_spectrum_sentence,
    "spectrum random": cmd_spectrum_random,
    "escape-map": cmd_escape_map,
    "overlay": cmd_overlay,
}


def _config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("extra", None)
    return d


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        cfg = run_config(args)
        COMMANDS[cfg.command](args, cfg)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    except (ConvergenceError, DegenerateMapError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, DataFormatError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (InvalidArgumentError, UnsupportedLengthError, SingularGaugeError, InsufficientWordsError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FZError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
