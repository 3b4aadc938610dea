import time

import numpy as np

from k3g16 import mukai, syzygy, t1, trivector, xquad

P = 101
t0 = time.time()
seed = mukai.generate_seed(P, 0)
alpha = mukai.build_alpha(seed)
qs = xquad.assemble_v10(seed, alpha)
syz = syzygy.linear_syzygies(qs)
phi = syzygy.phi_compute(syz, qs)
t2 = syzygy.t2_compute(syz, qs, phi)
print(f"pipeline: {time.time()-t0:.1f}s")

t0 = time.time()
run = t1.run_algorithm(seed, alpha, qs, rng_seed=0)
print(f"run_algorithm: {time.time()-t0:.1f}s")
print("k dims:", sorted({k.dim for k in run.k_spaces}))
print("delta dims:", sorted({d.dim for d in run.deltas}), "count:", len(run.deltas))
print("v35:", run.v35.dim, "n10:", run.n10.dim)
print("t1 nonzero coeffs:", int(np.count_nonzero(run.t1.to_vec())), "dual:", run.t1.dual)

t0 = time.time()
fresh = xquad.sample_x_points(seed, alpha, qs, 3, purpose="smoke/fresh-sixth")
fr = None
for cand in fresh:
    if all(cand.key() != pt.key() for pt in run.points):
        fr = cand
        break
rep = t1.verify_t1(qs, run, fresh=fr)
for c in rep:
    print(f"  {c['id']}: {c['status']} value={c['value']}")
print(f"verify: {time.time()-t0:.1f}s")

# headline cross-module identity
comp = trivector.compose(t2, run.t1)
print("compose(t2, t1) == 0:", not comp.any())

# perp of t2 contains t1
perp = trivector.perp_space(t2)
print("t1 in perp(t2):", perp.contains(run.t1.to_vec()))

# orbit tangent meet
t0 = time.time()
dim, holds = trivector.orbit_tangent_intersection(run.t1, perp)
print("orbit tangent meet perp: dim", dim, "contains t1:", holds, f"({time.time()-t0:.1f}s)")

# pencil is 4-secant to the rank-6 locus of t1
from k3g16.ffla import Subspace

pen = xquad.pencil(qs)
pen10 = Subspace.from_rows(qs.space.coords(pen.basis), P)
g, roots = trivector.line_secancy(run.t1, pen10)
print("pencil secancy deg:", g.size - 1, "roots:", roots.count_with_multiplicity if roots else None)

# Peskine slice degree for t1 (criterion 10 needs 15 for both forms)
t0 = time.time()
res = trivector.peskine_slice_degree(run.t1, rng_seed=0)
print("t1 slice degree:", res.value, "conclusive:", res.conclusive, f"({time.time()-t0:.1f}s)")

# rerun agreement
t0 = time.time()
agree = t1.rerun_agreement(seed, alpha, qs, run, rng_seed=1)
print("rerun agreement:", agree["value"], f"({time.time()-t0:.1f}s)")
