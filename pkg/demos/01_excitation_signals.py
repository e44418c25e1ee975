"""Excitation signals for the benchmark: random-phase multisine and swept sine.

The multisine excites every DFT line between 5 and 150 Hz with equal
amplitude and random phases, scaled to a chosen rms level; it is exactly
periodic and spectrally pure, which is what makes the averaged frequency
response estimates later in the pipeline noise-free.  The swept sine covers
20..50 Hz at 10 Hz/min and serves as an out-of-class test signal.

Run:  python demos/01_excitation_signals.py
Writes CSVs under demos/output/.
"""

import os

import numpy as np

from pnlssdec import MultisineSpec, SweptSineSpec, generate_multisine, \
    generate_swept_sine, rms
from pnlssdec.signals import save_signal

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

# --- multisine: 8192 samples per period at 750 Hz, band 5..150 Hz, rms 55
spec = MultisineSpec(samples_per_period=8192, fs=750.0, band_low=5.0,
                     band_high=150.0, target_rms=55.0, period_count=2, seed=0)
u = generate_multisine(spec)
lines = spec.excited_lines()
print(f"multisine: {lines.size} excited lines, k = {lines[0]}..{lines[-1]} "
      f"({lines[0] * 750 / 8192:.2f}..{lines[-1] * 750 / 8192:.2f} Hz)")
print(f"multisine: rms = {rms(u.samples):.4f} (target 55)")

spectrum = np.abs(np.fft.rfft(u.samples[:8192]))
off_band = np.ones(spectrum.size, bool)
off_band[lines] = False
print(f"multisine: spectral leakage outside the band "
      f"{spectrum[off_band].max() / spectrum[lines].max():.2e} relative")

# periodicity is exact by construction
assert np.array_equal(u.samples[:8192], u.samples[8192:])
print("multisine: periods are bit-identical")

# with ~1600 excited lines the amplitude distribution is close to Gaussian
from scipy import stats

print(f"multisine: skewness {stats.skew(u.samples):+.3f}, "
      f"kurtosis {stats.kurtosis(u.samples, fisher=False):.3f} (Gaussian: 0, 3)")
save_signal(u, os.path.join(OUT, "multisine_55N.csv"))

# --- swept sine: 20 -> 50 Hz at 10 Hz per minute -> 180 s
ss = SweptSineSpec(f_start=20.0, f_end=50.0, sweep_rate=10.0, amplitude=50.0,
                   fs=750.0)
v = generate_swept_sine(ss)
crossings = np.sum(np.diff(np.signbit(v.samples)) != 0)
print(f"sweptsine: duration {ss.resolved_duration():.0f} s, {len(v)} samples, "
      f"{crossings} zero crossings (chirp integral predicts "
      f"{180 * (20 + 50):.0f})")
save_signal(v, os.path.join(OUT, "sweptsine_20_50Hz.csv"))

print(f"wrote {OUT}/multisine_55N.csv and {OUT}/sweptsine_20_50Hz.csv")
