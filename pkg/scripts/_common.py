import argparse
from pathlib import Path


def out_dir(description):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out", default="figures", help="output directory (created if missing)")
    ap.add_argument("--quick", action="store_true", help="smaller sizes for a fast smoke run")
    args = ap.parse_args()
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path, args.quick
