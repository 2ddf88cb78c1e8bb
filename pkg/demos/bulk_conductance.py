"""Hall conductance of the Haldane pair, from Bloch bands and in real space.

    python demos/bulk_conductance.py [n]
"""
import sys

from bulkedge import BlochSymbol, TorusWindow, build_model, chern_fhs, eig_hermitian, sigma_realspace, spectral_projector

n = int(sys.argv[1]) if len(sys.argv) > 1 else 24
w = TorusWindow(n)
print(f"{'model':>14} {'s':>5} {'chern':>6} {'sigma(R=n/4)':>14} {'gap':>7}")
for s in (0.1, 0.5, 1.0):
    for kind, sign in (("haldane_plus", 1), ("haldane_minus", -1)):
        c = chern_fhs(BlochSymbol(s, sign), 64)
        sd = eig_hermitian(build_model(kind, s).matrix(w))
        rep = sigma_realspace(spectral_projector(sd, 0.0), w.origin, n // 4, w)
        gap = abs(sd.eigenvalues).min()
        print(f"{kind:>14} {s:5.2f} {c:6d} {rep.sigma:14.6f} {gap:7.3f}")
