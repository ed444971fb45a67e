"""What the discrete map conserves, and what it does not.

The continuous quartic-family flow conserves its Hamiltonian H exactly.
The discrete map conserves something slightly different: a rational
deformation of H.  So H itself wanders as the orbit travels its invariant
oval, and when the orbit makes one of its occasional large excursions (a
birational map is free to visit the far reaches of an invariant curve), H
follows the state out by orders of magnitude.  The modified Hamiltonian
never moves: it is pinned to the roundoff floor through the entire
itinerary.
"""

from kahan2d import Point2, QuarticParams, StepConfig, build_quartic, orbit

system = build_quartic(QuarticParams(1, 0, 1, 0, 1))
h = 0.05
traj = orbit(system.field, StepConfig(h), Point2(1.0, 1.0), 2000, system=system)

h0 = traj.records[0].H
ht0 = traj.records[0].Htilde
h_drift = max(abs(r.H - h0) / abs(h0) for r in traj.records)
ht_drift = max(abs(r.Htilde - ht0) / abs(ht0) for r in traj.records)
extent = max(max(abs(r.p.x), abs(r.p.y)) for r in traj.records)

print(f"orbit of {len(traj) - 1} steps at h = {h} from (1, 1)")
print(f"  farthest coordinate reached:        {extent:.3g}")
print(f"  worst relative drift of H:          {h_drift:.3e}")
print(f"  worst relative drift of Htilde:     {ht_drift:.3e}")
print()
print("early window: H wanders while Htilde stays put")
print(f"{'n':>6} {'H':>22} {'Htilde':>22}")
for r in traj.records[:101:10]:
    print(f"{r.n:>6} {r.H:>22.15g} {r.Htilde:>22.15g}")
print()
print("around the largest excursion: H leaves, Htilde does not")
peak = max(traj.records, key=lambda r: abs(r.H)).n
window = [r for r in traj.records if abs(r.n - peak) <= 3]
for r in window:
    print(f"{r.n:>6} {r.H:>22.6g} {r.Htilde:>22.15g}")
