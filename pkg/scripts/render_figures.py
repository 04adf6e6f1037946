#!/usr/bin/env python3
"""Render the three reference figures for the monic Chebyshev sequence.

Left to right: the depth-8 preimage of the thin rectangle
[-1,1] x [-0.0005, 0.0005] (a stand-in for the segment itself), and the
depth-5 and depth-100 preimages of the closed unit disk.  Output lands in
out/ as 16-bit grayscale PNG plus PGM.
"""
import argparse
import pathlib
import sys
import time

from nonauto.render import (RasterSpec, raster_membership, raster_rect_target,
                            write_pgm, write_png)
from nonauto.sequences import builtin, escape_radius_search

WINDOW = (-1.5, 1.5, -1.0, 1.0)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", default="900x600")
    parser.add_argument("--out-dir", default="out")
    parser.add_argument("--threads", type=int, default=0)
    args = parser.parse_args()
    width, _, height = args.size.partition("x")
    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    seq = builtin("minimal_chebyshev")
    radius = escape_radius_search(seq, 100)
    print(f"escape radius: {radius:.6f}", file=sys.stderr)

    jobs = [
        ("segment_preimage_n8", 8, "rect"),
        ("disk_preimage_n5", 5, "disk"),
        ("disk_preimage_n100", 100, "disk"),
    ]
    t0 = time.perf_counter()
    for name, depth, kind in jobs:
        spec = RasterSpec(*WINDOW, int(width), int(height), depth, radius)
        if kind == "rect":
            raster = raster_rect_target(seq, spec, (-1.0, 1.0, -0.0005, 0.0005),
                                        threads=args.threads)
        else:
            raster = raster_membership(seq, spec, threads=args.threads)
        write_png(raster, out_dir / f"{name}.png")
        write_pgm(raster, out_dir / f"{name}.pgm")
        print(f"{name}: {(raster.values == 0).sum()} in-set pixels")
    print(f"total {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
