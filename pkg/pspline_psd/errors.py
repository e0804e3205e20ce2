"""
Exceptions raised by the estimation pipeline.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""


class PsdError(Exception):
    """Base class for all pspline-psd errors."""


class DegenerateInputError(PsdError, ValueError):
    pass


class InputDomainError(PsdError, ValueError):
    pass


class KnotError(PsdError, ValueError):
    pass


class PenaltyError(PsdError, ValueError):
    pass


class InvalidModelError(PsdError, ValueError):
    pass


class NonStationaryError(PsdError, ValueError):
    pass


class ConfigError(PsdError, ValueError):
    pass
