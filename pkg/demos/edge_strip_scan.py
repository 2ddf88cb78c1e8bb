"""Invertibility of the strip edge operator as the second-neighbour strength grows.

The margin ``1 - ||K||`` certifies ``min|spec H_e| >= margin * min|spec H+|``
while it is positive; past that point the edge gap is measured directly.

    python demos/edge_strip_scan.py
"""
from bulkedge import TorusWindow, make_domain
from bulkedge.runner import margin_row

w = TorusWindow(32)
d = make_domain("strip", L=2)
cols = ("s", "norm", "margin", "certified_bound", "min_spec_he", "min_spec_hplus")
print(" ".join(f"{c:>15}" for c in cols))
for s in (1e-3, 1e-2, 3e-2, 0.1, 0.3):
    row = margin_row(s, d, w)
    print(" ".join(f"{row[c]:15.5g}" for c in cols))
