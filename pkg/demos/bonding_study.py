"""Solder reflow versus conductive adhesive.

Reflow flattens the bump and pulls the cap closer to the line, so the line
sees more of the cap.  A glue layer lifts it instead and adds a little series
resistance.  The comparison prints both against an unbonded reference.

    python demos/bonding_study.py
"""

import dataclasses

from waferpack import BondingSpec, bonding_comparison, default_grid, paper_default, standoff_gap

UM = 1e-6
base = paper_default()

for spec in (BondingSpec.none(), BondingSpec.reflow_to(40 * UM),
             BondingSpec.adhesive_layer(5 * UM), BondingSpec.adhesive_layer(10 * UM)):
    gap = standoff_gap(dataclasses.replace(base, bonding=spec))
    print(f"{spec.label:<15} cap-to-line gap {gap / UM:6.2f} um")

print()
cmp = bonding_comparison(base, default_grid(), frequencies=(5e9, 6e9))
print(cmp)

# Transmission hardly moves in any variant; the reflection is what changes.
worst = max(cmp.variants, key=lambda v: v.max_abs_delta_s21_db)
print(f"\nlargest S21 change anywhere on the grid: {worst.max_abs_delta_s21_db:.4f} dB "
      f"({worst.label})")
