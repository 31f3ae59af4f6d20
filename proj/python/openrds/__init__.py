"""Quenched transfer-operator laboratory for random open interval maps."""

from ._core import (  # noqa: F401
    Driving,
    Map,
    System,
    __version__,
    run_config,
    selftest,
)

__all__ = ["Map", "Driving", "System", "selftest", "run_config", "__version__"]
