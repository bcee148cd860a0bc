"""
Spatial resolution from a dot array
===================================

Fifteen 1 mm aluminium dots are scanned 0.5 mm below the sensor.  The
profiles through all dots are averaged and fitted with a rectangle blurred
by a Gaussian; the Gaussian FWHM is the resolution figure.
"""

import numpy as np
import matplotlib.pyplot as plt

from nveddy import CoilDrive, ScanConfig, average_cross_section, fit_square_gauss_kernel, scan
from nveddy.analysis import peak_positions, rect_gauss
from nveddy.emforward import SIGMA_ALUMINIUM
from nveddy.patterns import dot_grid_pattern, ingest_pattern

mask, _ = dot_grid_pattern()
cmap = ingest_pattern(mask, SIGMA_ALUMINIUM, pitch=50e-6, thickness=35e-6, standoff=0.5e-3)
cfg = ScanConfig.covering(cmap, 50e-6, CoilDrive(91e-6, 1e6))
img = scan(cmap, cfg)

centers = peak_positions(img, 0.5e-3)
profile = average_cross_section(img, centers, 1.5e-3)
fit = fit_square_gauss_kernel(profile, 1e-3)
print(f"{len(centers)} dots, FWHM = {fit.fwhm * 1e6:.0f} +/- {fit.fwhm_uncertainty * 1e6:.0f} um")

###############################################################################
# Neighbouring dots add a slowly varying background, which is why the fitted
# kernel comes out narrower than the response to a single small pixel.

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.imshow(img.r, origin="lower", extent=[img.x[0] * 1e3, img.x[-1] * 1e3,
                                          img.y[0] * 1e3, img.y[-1] * 1e3])
ax1.plot(*(np.array(centers).T * 1e3), "r+")
ax1.set_xlabel("x (mm)")
ax1.set_ylabel("y (mm)")
x = profile.positions
ax2.plot(x * 1e3, profile.values, ".", label="average profile")
ax2.plot(x * 1e3, rect_gauss(x, fit.fwhm, 1e-3, fit.amplitude, fit.center, fit.baseline),
         label="rect x Gaussian fit")
ax2.set_xlabel("position (mm)")
ax2.legend()
plt.show()
