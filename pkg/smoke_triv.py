import time

import numpy as np

from k3g16 import cover, mukai, syzygy, trivector, xquad
from k3g16.ffla import Subspace, kernel, normalize_point, rank, rng_stream

P = 101
t0 = time.time()
seed = mukai.generate_seed(P, 0)
alpha = mukai.build_alpha(seed)
qs = xquad.assemble_v10(seed, alpha)
syz = syzygy.linear_syzygies(qs)
phi = syzygy.phi_compute(syz, qs)
t2 = syzygy.t2_compute(syz, qs, phi)
print(f"pipeline: {time.time()-t0:.1f}s")

rng = np.random.default_rng(rng_stream(0, "smoke/triv"))

# (a) generic rank profile
t0 = time.time()
for _ in range(5):
    v = rng.integers(0, P, size=10)
    r, ker = trivector.peskine_test(t2, v)
    print("peskine_test generic:", r, ker)
print(f"  {time.time()-t0:.2f}s")

# (b) congruence line through a random point
q = normalize_point(rng.integers(0, P, size=10), P)
line = trivector.congruence_line_through(t2, q)
print("congruence line dim:", line.dim, "contains q:", line.contains(q))

# (c) secancy along that line; then along a random (non-congruence) line
t0 = time.time()
g, roots = trivector.line_secancy(t2, line)
print("congruence-line secancy gcd deg:", g.size - 1)
if roots:
    print("  roots w/ mult:", roots.count_with_multiplicity, "fp:", roots.fp, "fp2:", len(roots.fp2), "res:", roots.residual)
rnd_line = Subspace.from_rows(rng.integers(0, P, size=(2, 10)), P)
g2, roots2 = trivector.line_secancy(t2, rnd_line)
print("random-line secancy gcd deg:", g2.size - 1, "roots:", roots2)
print(f"  {time.time()-t0:.2f}s")

# (d) slice degree of the rank-<=6 locus
t0 = time.time()
res = trivector.peskine_slice_degree(t2, rng_seed=0)
print("peskine slice degree:", res.value, "plateau:", res.plateau_degree, "conclusive:", res.conclusive)
print("  history:", res.history)
print(f"  {time.time()-t0:.1f}s")

# (e) rational points of the rank-<=6 locus
t0 = time.time()
pts = trivector.peskine_sample(t2, 3, rng_seed=0)
for pt in pts:
    r, ker = trivector.peskine_test(t2, pt.coords)
    print("peskine point rank:", r, "kernel dim:", pt.kernel4.dim)
print(f"  sample: {time.time()-t0:.1f}s")

# (f) orthogonal complement dimension
t0 = time.time()
perp = trivector.perp_space(t2)
print("perp dim:", perp.dim, f"({time.time()-t0:.2f}s)")

# (g) orbit matrix identity column: h=id acts as 3*t
om = trivector.orbit_matrix(t2)
ident_col = np.zeros(120, dtype=np.int64)
for r_ in range(10):
    ident_col = (ident_col + om[:, r_ * 10 + r_]) % P
print("orbit id col == 3*t2:", np.array_equal(ident_col, (3 * t2.to_vec()) % P))

# --- cover ---
print("\n--- cover ---")
t0 = time.time()
pp = normalize_point(rng.integers(0, P, size=10), P)
img = cover.f_x(qs, pp)
print("f_x image head:", img[:4])
l_p = cover.invariant_line(syz, qs, pp)
print("invariant line dim:", l_p.dim, "contains p:", l_p.contains(pp))
ip = cover.involute(syz, qs, pp)
print("involute:", ip[:4], "on line:", l_p.contains(ip))
ipp = cover.involute(syz, qs, ip)
print("i(i(p)) == p:", np.array_equal(ipp, pp))
print("f(i(p)) == f(p):", np.array_equal(cover.f_x(qs, ip), img))
l_ip = cover.invariant_line(syz, qs, ip)
print("same invariant line:", l_ip.contains_space(l_p) and l_p.contains_space(l_ip))
print("ramification generic:", cover.ramification_value(qs, pp) != 0)
xpts = xquad.sample_x_points(seed, alpha, qs, 3, 40, "smoke/xpts")
print("ramification on X:", [cover.ramification_value(qs, x.coords) for x in xpts])
print(f"  basic cover ops: {time.time()-t0:.2f}s")

t0 = time.time()
rep = cover.invariant_line_congruence_check(syz, qs, t2, pp)
for c in rep:
    print(f"  {c['id']}: {c['status']} value={c['value']}")
print(f"  congruence check: {time.time()-t0:.2f}s")
