"""
Minimum detectable conductivity
===============================

How weakly conducting can a sample be before its eddy-current field drops
below the magnetometer's noise floor?  We take a 1 mm radius, 0.1 mm thick
disc half a millimetre below the sensor, driven by a 91 uT field at 3.5 MHz.
"""

import numpy as np
import matplotlib.pyplot as plt

from nveddy import CoilDrive, SampleDisc, secondary_field_on_axis, skin_depth
from nveddy.analysis import min_detectable_conductivity

drive = CoilDrive(91e-6, 3.5e6)
noise = 10e-6  # T/sqrt(Hz)

sigma_min = min_detectable_conductivity(1e-3, 0.1e-3, 0.5e-3, drive, noise)
print(f"sigma_min = {sigma_min:.3g} S/m/sqrt(Hz)")
print(f"skin depth at sigma_min: {skin_depth(sigma_min, drive.frequency) * 1e6:.0f} um")

###############################################################################
# The secondary field grows linearly with conductivity while the sample stays
# thinner than the skin depth.  For good conductors the currents crowd into a
# surface layer, the response saturates and its phase departs from pi/2.

sigmas = np.logspace(4, 8, 200)
thin = [secondary_field_on_axis(SampleDisc(1e-3, 0.1e-3, s, 0.5e-3), drive,
                                skin_effect=False).amplitude for s in sigmas]
full = [secondary_field_on_axis(SampleDisc(1e-3, 0.1e-3, s, 0.5e-3), drive)
        for s in sigmas]

fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
ax1.loglog(sigmas, thin, "--", label="thin limit")
ax1.loglog(sigmas, [z.amplitude for z in full], label="with skin effect")
ax1.axhline(noise, color="k", lw=0.8, label="noise floor (1 Hz)")
ax1.axvline(sigma_min, color="k", ls=":")
ax1.set_ylabel("secondary field (T)")
ax1.legend()
ax2.semilogx(sigmas, np.degrees([z.phase for z in full]))
ax2.set_xlabel("conductivity (S/m)")
ax2.set_ylabel("phase (deg)")
plt.show()
