from ._idekit import *  # noqa: F401,F403
