"""Grassmann algebra, weighted distribution spaces and Fock-space processes."""

from .core import *  # noqa: F401,F403
from .core import __all__ as _core_all
from .dense import *  # noqa: F401,F403
from .dense import __all__ as _dense_all
from .distributions import *  # noqa: F401,F403
from .distributions import __all__ as _dist_all
from .errors import *  # noqa: F401,F403
from .errors import __all__ as _err_all
from .fock import *  # noqa: F401,F403
from .fock import __all__ as _fock_all
from .hermite import *  # noqa: F401,F403
from .hermite import __all__ as _herm_all
from .process import *  # noqa: F401,F403
from .process import __all__ as _proc_all

__all__ = _core_all + _dense_all + _dist_all + _err_all + _fock_all + _herm_all + _proc_all
__version__ = "0.1.0"
