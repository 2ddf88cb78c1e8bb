"""Filling of the bulk gap by edge spectrum on a half torus.

Both halves of the torus hold balls of radius n/4.  As n grows the largest
hole of the spectrum inside (-0.5, 0.5) shrinks roughly like ln R / R.

    python demos/halftorus_density.py 16 24 32
"""
import sys

from bulkedge.runner import fit_log_coefficient, half_torus_density

ns = [int(a) for a in sys.argv[1:]] or [16, 24, 32]
rows = [half_torus_density(n, 0.5) for n in ns]
c, pointwise = fit_log_coefficient(ns, [r["density"] for r in rows])
print(f"{'n':>4} {'density':>9} {'in gap':>7} {'c(n)':>7}")
for r, cn in zip(rows, pointwise):
    print(f"{r['n']:4d} {r['density']:9.4f} {r['n_in_gap']:7d} {cn:7.3f}")
print(f"least-squares c = {c:.3f}")
