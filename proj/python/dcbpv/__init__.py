"""Python bindings for the dcbpv kernel.

The heavy lifting lives in the compiled extension module `_dcbpv`; this
package re-exports its entry points.
"""

from _dcbpv import (  # noqa: F401
    check_source,
    run_source,
    translate_source,
    normalize_source,
)

__all__ = [
    "check_source",
    "run_source",
    "translate_source",
    "normalize_source",
]
