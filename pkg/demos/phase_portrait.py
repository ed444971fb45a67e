"""Discrete orbits trace the level sets of the conserved quantity.

Seeds are placed along a diagonal segment; each discrete orbit then fills
in an oval of the modified Hamiltonian.  The result is written as a static
SVG next to this script.  The command-line equivalent is:

    kahan2d phase --family quartic --params 1,0,1,0,1 --h 0.02 \
        --steps 600 --orbits 6 --segment 0.6,0.6,1.6,1.6 \
        --region 0,3,-3,3 --format svg --out portrait.svg
"""

from pathlib import Path

from kahan2d import Point2, QuarticParams, StepConfig, build_quartic, orbit
from kahan2d.export import render_phase_svg

system = build_quartic(QuarticParams(1, 0, 1, 0, 1))
cfg = StepConfig(0.02)

orbits = []
n_orbits = 6
for i in range(n_orbits):
    frac = i / (n_orbits - 1)
    start = Point2(0.6 + frac, 0.6 + frac)
    orbits.append(orbit(system.field, cfg, start, 600, system=system))

svg = render_phase_svg(orbits, region=(0.0, 3.0, -3.0, 3.0),
                       title="quartic family, nested discrete orbits")
out = Path(__file__).with_name("portrait.svg")
out.write_text(svg)

for i, traj in enumerate(orbits):
    tail = f", terminated early ({traj.termination_reason})" if traj.terminated_early else ""
    print(f"orbit {i}: {len(traj) - 1} steps, Htilde = {traj.records[0].Htilde:.6g}{tail}")
print(f"wrote {out}")
