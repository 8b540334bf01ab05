from ._taylorlaw import *  # noqa: F401,F403
from ._taylorlaw import __doc__  # noqa: F401
