"""Eye-in-hand visual servoing simulator for a UR5e arm.

Joint vectors, points and pixels are numpy arrays. Configurations are passed
as the same ``key = value`` text the ``vservo`` command line reads.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
