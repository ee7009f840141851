"""From plated metals to one effective bump.

Plating 15.3 um of Au and 10 um of Sn on a 1 um Ti seed, then reflowing,
turns the Sn and most of the Au into AuSn.  This walk-through follows the
stack through alloying, collapses it to one equivalent layer and shows what
happens to its height and resistance when the bump spreads on reflow.

    python demos/collapse_and_reflow.py
"""

from waferpack import (
    BumpGeometry,
    LayerStack,
    MaterialLayer,
    collapse_stack,
    load_catalog,
    reflow,
    solder_alloy_transform,
    thickness_fraction,
)

UM = 1e-6
catalog = load_catalog()

# Alloying: every Sn layer takes 0.9x its thickness of Au with it.
ausn, au = solder_alloy_transform(15.3 * UM, 10 * UM)
print(f"after alloying: {ausn / UM:.2f} um AuSn + {au / UM:.2f} um residual Au")

radius = 30 * UM
stack = LayerStack(
    (MaterialLayer.from_catalog("AuSn", ausn, catalog),
     MaterialLayer.from_catalog("Au", au, catalog),
     MaterialLayer.from_catalog("Ti", 1 * UM, catalog)),
    3.141592653589793 * radius**2,
)
for i, layer in enumerate(stack.layers):
    print(f"  {layer.name:<5} {layer.thickness / UM:5.2f} um  sigma {layer.conductivity:9.3g} S/m"
          f"  x = {thickness_fraction(stack, i):.4f}")

# Current crosses the layers one after another, so the low-conductivity AuSn
# dominates the effective value.
eff = collapse_stack(stack)
print(f"\ncollapsed: {eff.thickness / UM:.2f} um at {eff.conductivity:.4g} S/m")
print(f"bump resistance: {stack.resistance() * 1e3:.4f} mohm")

# Reflow keeps the volume, so a wider footprint means a flatter bump.
bump = BumpGeometry.from_stack(radius, stack)
print("\nreflow (volume conserved):")
for r_eff in (30, 35, 40, 45):
    out = reflow(bump, r_eff * UM)
    print(f"  r = {r_eff} um: h = {out.height / UM:6.3f} um, "
          f"R = {out.stack.resistance() * 1e3:.4f} mohm")

# Flatter and wider gives a lower resistance, but the standoff between cap
# and line shrinks with it; bonding_study.py shows what that costs.
