"""
Choosing the bias field
=======================

The microwave-free magnetometer reads fields through the slope of its
photoluminescence versus bias field.  We plot the model PL curve, the lock-in
signal it implies and the best operating point in each region.
"""

import numpy as np
import matplotlib.pyplot as plt

from nveddy import MagnetometerParams, lockin_r_vs_bias, pl_vs_field, select_operating_point
from nveddy.magnetometer import REGION_WINDOWS

b = np.linspace(0, 0.12, 4000)
fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
for angle in (0.0, 0.5, 3.0):
    params = MagnetometerParams(misalignment_angle=angle)
    ax1.plot(b * 1e3, pl_vs_field(b, params), label=f"{angle} deg")
    ax2.semilogy(b * 1e3, lockin_r_vs_bias(b, params) + 1e-9)

params = MagnetometerParams()
for region, (lo, hi) in REGION_WINDOWS.items():
    op = select_operating_point(region, params)
    print(f"{region:5s}: bias {op.bias_field * 1e3:7.3f} mT, "
          f"responsivity {op.responsivity:.3g} /T")
    ax2.axvspan(lo * 1e3, hi * 1e3, alpha=0.1)
    ax2.plot(op.bias_field * 1e3, op.responsivity * params.modulation_amplitude, "ko")

ax1.set_ylabel("PL (normalized at 80 mT)")
ax1.legend(title="misalignment")
ax2.set_xlabel("bias field (mT)")
ax2.set_ylabel("lock-in R")
plt.show()
