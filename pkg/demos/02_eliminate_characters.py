"""Narrowing the Hecke characters attached to X_1 prime by prime.

Starts from every unit-compatible character of the right infinity type whose
conductor divides the maximal modulus over the bad primes, then discards
those whose power sums disagree with the point counts.  One Galois orbit of
size six survives.
"""

from sympy import primerange

from k3cm.counting import count_surface, load_surface, surface_bad_primes
from k3cm.hecke import TYPE_X, enumerate_hecke, euler_factor_Q, slot_assignments
from k3cm.numfield import load_field
from k3cm.pipeline import format_poly

X = load_surface(1)
K = load_field(1)
bad = surface_bad_primes(X)
cs = enumerate_hecke(K, TYPE_X, bad)
print(f"bad primes {sorted(bad)}, maximal modulus norm {cs.modulus.norm}")
print(f"{len(slot_assignments(TYPE_X))} slot assignments, {cs.count()} unit-compatible candidates")

for p in primerange(5, 200):
    if p in bad:
        continue
    levels = (1, 2) if p <= 60 else (1,)
    traces = {m: count_surface(X, p, m).S for m in levels}
    n = cs.filter_traces(p, traces)
    print(f"  p = {p:<3} traces {traces} -> {n} left")
    if n <= 6:
        break

orbits = cs.orbits()
print(f"\n{len(orbits)} orbit(s) of sizes {[len(o) for o in orbits]}")
psi = orbits[0][0]
print(f"conductor norm {psi.conductor().norm}, infinity type {psi.itype.label()}")
print(f"L_17 = {format_poly(euler_factor_Q(psi, 17).coeffs)}")
