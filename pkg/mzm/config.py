"""
Configuration for the MZM transfer-curve layer
Fit tolerances and the reference device used by presets and fixtures
"""
import math

# Fit Settings
FIT_MAX_ITERATIONS = 200        # iteration cap per Levenberg-Marquardt start
FIT_RELATIVE_TOLERANCE = 1e-10  # stop when the relative cost change drops below this
FIT_PARAMETER_TOLERANCE = 1e-12
FIT_RESIDUAL_TOLERANCE = 1e-6   # residual RMS above this at the cap is non-convergence
FIT_FREQUENCY_CANDIDATES = 160  # log-spaced phase-rate scan used by the initializer
FIT_LM_STARTS = 3               # best scan candidates refined with LM
FIT_MIN_SAMPLES = 3             # one per model parameter

# Reference Device (half-wave voltage of the characterised modulator)
REFERENCE_V_PI = 5.73  # volts
REFERENCE_A = 0.5
REFERENCE_B = math.pi / REFERENCE_V_PI
REFERENCE_C = -math.pi / 2
REFERENCE_WINDOW = (0.0, REFERENCE_V_PI)

# Sample file format
SAMPLE_COLUMNS = ('voltage_V', 'transmission')
