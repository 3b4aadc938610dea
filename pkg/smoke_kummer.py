import time

import numpy as np

from k3g16 import kummer, mukai, syzygy, trivector, xquad

P = 101
t0 = time.time()
seed = mukai.generate_seed(P, 0)
alpha = mukai.build_alpha(seed)
qs = xquad.assemble_v10(seed, alpha)
syz = syzygy.linear_syzygies(qs)
phi = syzygy.phi_compute(syz, qs)
t2 = syzygy.t2_compute(syz, qs, phi)
pesk = trivector.peskine_sample(t2, 3, rng_seed=0)
print(f"stack: {time.time()-t0:.1f}s")

q = pesk[0].coords
t0 = time.time()
fr = kummer.frame(syz, qs, q)
print(f"frame: {time.time()-t0:.1f}s")
for c in kummer.frame_report(fr):
    print("  ", c)
print("  z6 rational pts:\n", fr.z6_rational)

t0 = time.time()
W = kummer.weddle(fr)
print(f"weddle: {time.time()-t0:.1f}s, terms={len(W.terms)}")
for c in kummer.weddle_report(fr, W):
    print("  ", c)

t0 = time.time()
K, lam = kummer.kummer_quartic(fr, W)
print(f"branch quartic: {time.time()-t0:.1f}s, lam={lam}, terms={len(K.terms)}")
for c in kummer.kummer_checks(fr, W, K, lam):
    print("  ", c)
print(f"checks: {time.time()-t0:.1f}s")

t0 = time.time()
cubic, rep = kummer.cubic_surface(fr, t2)
print(f"cubic: {time.time()-t0:.1f}s")
for c in rep:
    print("  ", c)
