"""Visibility benchmark: how fast does the trace signal fade with circuit depth?

The payload U (U† U)^(l-1) is logically U for every l, so the ideal sweep
<σx>(θ) = cos^N(θ/2) never changes. Noise makes the peak (the visibility)
shrink with the CNOT count; an exponential fit gives the decay length τ in
CNOTs. A coherent error on the control additionally tilts signal into σy.
"""

import warnings

from dqc1bench import NoiseModel
from dqc1bench.bench import coherent_error_metric, fit_exponential, visibility, visibility_series

for label, model in (("depolarizing only", NoiseModel(coherent_eps=0.0)),
                     ("plus coherent eps=0.05", NoiseModel(coherent_eps=0.05))):
    curves = visibility_series(1, range(6), model, shots=2**15, seed=0)
    print(label)
    for c in curves:
        print(f"  l={c.l}  CNOTs={c.cnots:2d}  visibility={visibility(c):.3f}  max|<σy>|={coherent_error_metric(c):.3f}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = fit_exponential((c.cnots, visibility(c)) for c in curves)
    print(f"  fit: tau={fit.tau:.1f} CNOTs  R²={fit.r_squared:.3f}")

# without coherent error the largest |<σy>| over 25 points stays within ~3x the
# per-point shot noise 2**-7.5 ≈ 0.0055; with it, |<σy>| grows with depth
