"""Series solver for a mixed-type fractional diffusion problem.

The model problem lives on the strip (x, t) in (0, 1) x (-T, T): a
hyper-Bessel Caputo evolution for t > 0, a right-sided bi-ordinal
Hilfer evolution for t < 0, a Bessel operator in x, homogeneous
boundary data at x = 1, gluing conditions across t = 0, and a
non-local condition tying weighted fractional integrals of the past
to the terminal value.  The solution is a Fourier-Bessel series whose
mode coefficients are explicit Mittag-Leffler expressions; everything
the formulas claim is independently re-checked by quadrature oracles.
"""

from .errors import NumericError, SolvabilityError
from .specfun import MLParams, bessel_j, gamma, mittag_leffler, rgamma

__version__ = "0.1.0"

__all__ = [
    "MLParams",
    "NumericError",
    "SolvabilityError",
    "bessel_j",
    "gamma",
    "mittag_leffler",
    "rgamma",
    "__version__",
]
