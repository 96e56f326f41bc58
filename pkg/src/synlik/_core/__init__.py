"""Hot-kernel backend selection.

Imports the compiled extension when present, otherwise the numpy
fallback. Set SYNLIK_FORCE_FALLBACK=1 to force the pure-Python path
(used by the benchmark and the backend-agreement tests).
"""

import os

from . import fallback as _fallback

if os.environ.get("SYNLIK_FORCE_FALLBACK") == "1":
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

BACKEND = "compiled" if _impl is not _fallback else "fallback"

kde_eval = _impl.kde_eval
boombust_path = _impl.boombust_path
