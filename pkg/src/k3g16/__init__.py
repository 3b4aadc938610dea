"""Exact mod-p verification pipeline for a genus-16 K3 quadric model.

Everything downstream of a (prime, rng_seed) pair is deterministic: the
package builds a 10-dimensional space of quadrics cutting out a 3-fold in
P^9, extracts its linear syzygies and two alternating 3-tensors, and
certifies a list of integer invariants (dimensions, degrees, intersection
numbers) by exact linear algebra over F_p.
"""

__version__ = "0.1.0"
