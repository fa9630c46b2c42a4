from ._fvkit import *  # noqa: F401,F403
from ._fvkit import Error, __version__  # noqa: F401
