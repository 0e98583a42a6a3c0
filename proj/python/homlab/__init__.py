"""Homomorphisms, polymorphisms and CSP classification for finite relational structures."""

from ._core import *  # noqa: F401,F403
from ._core import GuardExceeded, FormatError, HomlabError, Structure, Operation

__all__ = [name for name in dir() if not name.startswith("_")]
