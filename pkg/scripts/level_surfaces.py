#!/usr/bin/env python3
"""Export the nine constant-discord level surfaces: one mesh per category
(odd, 2 mod 4, 0 mod 4, represented by N = 3, 2, 4) at levels 0.03, 0.15
and 0.55."""

import argparse
from pathlib import Path

from qdiscord.surface import export_mesh, extract_isosurface, mesh_area, sample_field


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--resolution", type=int, default=61)
    parser.add_argument("--levels", type=float, nargs="+", default=[0.03, 0.15, 0.55])
    parser.add_argument("--format", choices=("obj", "csv"), default="obj")
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    args = parser.parse_args()

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for n in (3, 2, 4):
        field = sample_field(n, args.resolution)
        for level in args.levels:
            mesh = extract_isosurface(field, level)
            path = args.out_dir / f"surface_n{n}_level{level:g}.{args.format}"
            export_mesh(mesh, args.format, path)
            print(
                f"n={n} level={level:g}: vertices={len(mesh.vertices)} "
                f"triangles={len(mesh.triangles)} area={mesh_area(mesh):.3f} -> {path}"
            )


if __name__ == "__main__":
    main()
