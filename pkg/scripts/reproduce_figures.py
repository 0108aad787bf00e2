"""Simulate the five illustration fields and dump each time slice as a PGM image.

    python scripts/reproduce_figures.py --out out/figures [--only fig3 fig4]
"""

import argparse
import dataclasses
from pathlib import Path

import numpy as np

from stgneiting.cli import run
from stgneiting.io import load_config, read_raw

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
FIGURES = ("fig1", "fig2", "fig3", "fig4", "fig5")


def write_pgm(path: Path, img: np.ndarray, lo: float, hi: float) -> None:
    g = np.clip((img - lo) / (hi - lo), 0, 1)
    data = np.round(255 * g).astype(np.uint8)
    h, w = data.shape
    path.write_bytes(f"P5 {w} {h} 255\n".encode() + data.tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/figures")
    ap.add_argument("--only", nargs="+", choices=FIGURES)
    args = ap.parse_args()
    for name in args.only or FIGURES:
        config = load_config(CONFIGS / f"{name}.toml")
        config = dataclasses.replace(config, out_dir=str(Path(args.out) / name), format="raw")
        res = run(config)
        values, meta = read_raw(res.files[0])
        nt, (nx, ny) = meta["grid"]["t_count"], meta["grid"]["shape"]
        cube = values.reshape(nt, nx, ny)
        lo, hi = np.quantile(cube, [0.005, 0.995])
        for i, sl in enumerate(cube):
            # x runs left to right, y bottom to top
            write_pgm(Path(config.out_dir) / f"slice_{i}.pgm", sl.T[::-1], lo, hi)
        print(f"{name}: {config.model.describe()} {config.method.value} -> {config.out_dir} "
              f"(mean {cube.mean():+.3f}, var {cube.var():.3f})")


if __name__ == "__main__":
    main()
