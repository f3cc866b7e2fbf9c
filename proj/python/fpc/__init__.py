"""First-passage structural credit model: CDS calibration and counterparty pricing."""

from ._fpc import *  # noqa: F401,F403
from ._fpc import __doc__  # noqa: F401
