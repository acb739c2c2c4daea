from ._psprog import *  # noqa: F401,F403
from ._psprog import __version__  # noqa: F401
