"""Selection of the slot-simulation kernel at import time.

The compiled Cython kernel is preferred when the extension built; the numpy
kernel is a drop-in replacement with bit-identical output. simulate() takes
an optional backend name so tests and benchmarks can force either one.
"""

from __future__ import annotations

from types import ModuleType

from agenet import _agekernel_py

try:
    from agenet import _agekernel  # compiled extension, optional
except ImportError:  # pragma: no cover - depends on the build environment
    _agekernel = None

_BACKENDS: dict[str, ModuleType] = {"numpy": _agekernel_py}
if _agekernel is not None:
    _BACKENDS["compiled"] = _agekernel

DEFAULT_BACKEND = "compiled" if _agekernel is not None else "numpy"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def kernel_backend() -> str:
    """Name of the kernel used by default in this process."""
    return DEFAULT_BACKEND


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        name = DEFAULT_BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        ) from None
