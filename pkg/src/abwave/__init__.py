"""Spectral tools for wave, Klein-Gordon and Dirac flows with an Aharonov-Bohm potential in the plane.

Submodules are loaded on first attribute access, so ``abwave.cli`` can set
thread limits before numpy is imported.
"""

import importlib

__version__ = "0.1.0"

_SUBMODULES = ("bessel", "cli", "errors", "fields", "hankel", "io", "modes", "norms", "operators",
               "plotting", "propagators", "verify")
_EXPORTS = {
    "bessel_j": "bessel", "bessel_j_prime": "bessel", "schlafli_decompose": "bessel",
    "envelope_bound": "bessel", "cutoff_chi": "bessel",
    "FluxParameter": "modes", "Mode": "modes",
    "RadialGrid": "hankel", "RadialFunction": "hankel", "hankel_forward": "hankel",
    "hankel_multiplier": "hankel", "relativistic_hankel": "hankel", "relativistic_inverse": "hankel",
    "ModeStack": "operators", "SpinorModeStack": "operators", "decompose_scalar": "operators",
    "decompose_spinor": "operators", "recompose_scalar": "operators", "recompose_spinor": "operators",
    "half_wave_evolve": "propagators", "wave_evolve": "propagators",
    "klein_gordon_evolve": "propagators", "dirac_evolve": "propagators",
    "FrequencyWindow": "propagators", "WaveState": "propagators",
    "MixedNormSpec": "norms", "mixed_norm": "norms", "strichartz_ratio_wave": "norms",
    "strichartz_ratio_dirac": "norms", "strichartz_ratios": "norms", "weighted_smoothing_norm": "norms",
    "DataFamily": "verify", "EstimateReport": "verify",
}
__all__ = sorted(_EXPORTS) + list(_SUBMODULES)


def __getattr__(name):
    if name in _SUBMODULES:
        return importlib.import_module(f".{name}", __name__)
    if name in _EXPORTS:
        return getattr(importlib.import_module(f".{_EXPORTS[name]}", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
