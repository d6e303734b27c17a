"""From point counts to Euler factors at one prime.

Counts points on the double plane X_1 and on the curve C_1 over F_17,
F_17^2 and F_17^3, rebuilds the degree-6 Euler factors from the traces,
and splits the exterior square of the curve factor.
"""

from k3cm.counting import (TraceData, algebraic_part_factor, count_surface, curve_euler_factor,
                           curve_trace, exterior_square, load_curve, load_surface, poly_divexact,
                           weil_from_traces)
from k3cm.numfield import cubic_subfield_split, load_field
from k3cm.pipeline import format_poly

p = 17
X, C = load_surface(1), load_curve(1)

print(f"X_1 over F_{p}^m")
for m in (1, 2, 3):
    c = count_surface(X, p, m)
    print(f"  m={m}: N = {c.N}, transcendental trace S = {c.S}, rational nodes = {c.nodes}")

traces = TraceData(p, tuple((m, count_surface(X, p, m).S) for m in (1, 2, 3)), "transcendental-K3")
LX = weil_from_traces(traces)
print(f"  L_{p}(T(X_1)) = {format_poly(LX.coeffs)}")

print(f"\nC_1 over F_{p}^m")
for m in (1, 2, 3):
    print(f"  m={m}: t = {curve_trace(C, p, m)}")
LA = curve_euler_factor(C, p)
print(f"  L_{p}(H^1) = {format_poly(LA.coeffs)}")

E2 = exterior_square(LA)
split = cubic_subfield_split(load_field(1), p)
alg = algebraic_part_factor(split, p)
rest = poly_divexact(E2.coeffs, alg.coeffs)
print(f"\nexterior square, degree {E2.degree}")
print(f"  cubic subfield splitting at {p}: {split}")
print(f"  algebraic part: {format_poly(alg.coeffs)}")
rest2 = poly_divexact(rest, LX.coeffs)
print(f"  divisible by L_{p}(T(X_1)): {rest2 is not None}")
print(f"  remaining sextic: {format_poly(rest2)}")
