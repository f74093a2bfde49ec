"""U/V statistics of weakly dependent sequences and their limit laws."""

from _uvstat import *  # noqa: F401,F403
from _uvstat import __doc__  # noqa: F401
