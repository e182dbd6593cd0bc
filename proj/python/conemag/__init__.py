"""Python interface to the conemag library."""

from ._conemag import *  # noqa: F401,F403
from ._conemag import __doc__  # noqa: F401
