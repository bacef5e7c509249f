"""Linear position-measurement models: closed-form errors, momentum
disturbance and uncertainty relations, cross-checked on a wavefunction grid."""

from ._linmeas import *  # noqa: F401,F403
from ._linmeas import LinmeasError, __doc__  # noqa: F401

__version__ = "0.1.0"
