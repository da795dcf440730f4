"""Grid-tagging discontinuous NER with entity-centric augmentation."""

from seda._core import *  # noqa: F401,F403
from seda._core import __version__  # noqa: F401
