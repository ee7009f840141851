"""Which cap wafer, and how much does the via liner matter?

Sweeps the cap resistivity and the via sidewall oxide, writes the sweep to a
CSV and prints the trends.  A lossy (low-resistivity) cap bleeds signal into
the silicon; a high-resistivity one barely notices the liner thickness.

    python demos/resistivity_study.py [out.csv]
"""

import sys

from waferpack import (
    Axis,
    DesignSpace,
    Metric,
    default_grid,
    evaluate,
    magnitude_db,
    paper_default,
    rank,
    run_sweep,
    trend_report,
    uncapped_response,
)

UM = 1e-6
grid = default_grid()
base = paper_default()

# The cost of capping at all: compare against the bare line.
capped, bare = evaluate(base, grid), uncapped_response(base, grid)
i = capped.index_of(5e9)
print(f"5 GHz S21: bare line {magnitude_db(bare.s21[i]):.4f} dB, "
      f"capped {magnitude_db(capped.s21[i]):.4f} dB")

s21 = Metric.parse("s21@5GHz")
s11 = Metric.parse("s11@6GHz")
space = DesignSpace(base, (
    Axis("cap_resistivity", (15.0, 1000.0, 2000.0)),
    Axis("oxide_thickness", tuple(t * UM for t in range(1, 7))),
))
table = run_sweep(space, grid, [s21, s11])
if len(sys.argv) > 1:
    table.to_csv(sys.argv[1])
    print(f"wrote {sys.argv[1]}")

print("\nbest five by insertion loss:")
for row in rank(table, s21)[:5]:
    rho, ox = row.coords
    print(f"  {rho:6g} ohm.cm, oxide {ox / UM:g} um: S21 {row.values[0]:.4f} dB")

# Per cap, how far does S11 move while the liner goes from 1 to 6 um?
print("\noxide sensitivity of S11 at 6 GHz:")
report = trend_report(table, "oxide_thickness", s11)
for (rho,), cls, tv in report.groups:
    print(f"  {rho:6g} ohm.cm: {cls:<14} total variation {tv:.3f} dB")
