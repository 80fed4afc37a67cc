"""Errors raised by the triangle-jacobi command line."""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.


class TriangleJacobiError(Exception):
    """Common parent for command-line errors, allowing to catch them all at once."""

    pass


class ConfigError(TriangleJacobiError):
    """Raised when the merged run configuration does not follow the options schema."""

    pass


class CatalogueNotFoundError(TriangleJacobiError):
    """Raised when the relation catalogue file cannot be read."""

    pass


class ReportWriteError(TriangleJacobiError):
    """Raised when the JSON report cannot be written to its destination."""

    pass
