from . import common
from . import types
from ._graphs import graphs

__all__ = ["graphs", "types", "common"]
