import time

import numpy as np

from k3g16 import discrim, mukai, syzygy, trivector, xquad
from k3g16.ffla import rank, rng_stream

P = 101
t0 = time.time()
seed = mukai.generate_seed(P, 0)
alpha = mukai.build_alpha(seed)
qs = xquad.assemble_v10(seed, alpha)
syz = syzygy.linear_syzygies(qs)
phi = syzygy.phi_compute(syz, qs)
t2 = syzygy.t2_compute(syz, qs, phi)
print(f"pipeline: {time.time()-t0:.1f}s")

rng = np.random.default_rng(rng_stream(0, "smoke/discrim"))

# disc basics
u = rng.integers(0, P, size=10)
val, grad = discrim.disc_value_and_grad(qs, u)
print("generic det nonzero:", val != 0, "| grad nonzero:", bool(grad.any()))
lam = 7
val2, _ = discrim.disc_value_and_grad(qs, (lam * u) % P)
print("scaling det(lam u) == lam^10 det(u):", val2 == pow(lam, 10, P) * val % P)

# pencil member -> det 0
pen = xquad.pencil(qs)
pmem = qs.space.coords(pen.basis[0])
valp, gradp = discrim.disc_value_and_grad(qs, pmem)
print("pencil member det:", valp, "grad any:", bool(gradp.any()))

# x60 membership at a sampled X point
xpts = xquad.sample_x_points(seed, alpha, qs, 2, purpose="smoke/discrim-x")
rep = discrim.x60_membership(syz, qs, xpts[0])
for c in rep:
    print(f"  {c['id']}: {c['status']} value={c['value']}")

# fit1 slice degree
t0 = time.time()
res = discrim.fit1_slice_degree(qs, rng_seed=0)
print("fit1 degree:", res.value, "conclusive:", res.conclusive, "history:", res.history, f"({time.time()-t0:.1f}s)")

# sing slice degree
t0 = time.time()
res2 = discrim.sing_slice_degree(qs, rng_seed=0)
print("sing degree:", res2.value, "conclusive:", res2.conclusive, f"({time.time()-t0:.1f}s)")
print("  history:", res2.history)

# partials recheck on a slice
t0 = time.time()
emb_rng = np.random.default_rng(rng_stream(0, "smoke/discrim-emb"))
emb = discrim._random_slice(P, emb_rng)
forms = discrim.partial_forms(qs, emb, rng_seed=3)
print("partials reevaluate:", discrim.partials_reevaluate(qs, emb, forms, rng_seed=4), f"({time.time()-t0:.1f}s)")

# fit0 s' checks
t0 = time.time()
pesk = trivector.peskine_sample(t2, 3, rng_seed=0)
rep2 = discrim.fit0_sprime_checks(syz, pesk, rng_seed=0)
for c in rep2:
    print(f"  {c['id']}: {c['status']} value={c['value']}")
print(f"fit0: {time.time()-t0:.1f}s")
