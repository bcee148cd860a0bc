"""
Sensor bandwidth
================

The optical readout behaves as a first-order low-pass whose cutoff rises
with pump intensity.  We sweep the drive frequency for a few intensities,
add 1% multiplicative noise and fit the cutoff back.
"""

import numpy as np
import matplotlib.pyplot as plt

from nveddy import MagnetometerParams, bandwidth_cutoff, fit_lowpass, sensor_response

params = MagnetometerParams()
f = np.logspace(4, 8, 30)
rng = np.random.default_rng(0)

for intensity in (20.0, 180.0, 600.0):
    fc = bandwidth_cutoff(intensity, 3.0, params)
    data = sensor_response(f, fc) * (1 + 0.01 * rng.standard_normal(f.size))
    fit = fit_lowpass(f, data)
    print(f"{intensity:5.0f} W/mm^2: model {fc:.3g} Hz, fitted {fit.cutoff:.3g} Hz "
          f"+/- {fit.cutoff_uncertainty:.2g}")
    line, = plt.loglog(f, data, "o", ms=3)
    plt.loglog(f, fit.amplitude * sensor_response(f, fit.cutoff), color=line.get_color(),
               label=f"{intensity:.0f} W/mm$^2$")

plt.xlabel("frequency (Hz)")
plt.ylabel("normalized response")
plt.legend()
plt.show()
