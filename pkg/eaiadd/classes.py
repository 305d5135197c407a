# -*- coding: utf-8 -*-
""" Class definitions for the EAI-ADD command line tool and library.
"""

from typing import List


# Generic error class
class Error(Exception):
    """Base class for exceptions in this package."""
    pass


class Errors(Error):
    """Wrapper class for multiple errors

    Attributes:
        errors -- explanation of the errors, that may be encountered
    """

    def __init__(self, errors: List[Error]):
        self.errors = errors
        super().__init__("\n".join(map(str, errors)))


# Specific error class for local config file errors
class ConfigError(Errors):
    """Exception raised for options malformed or not defined in config.
    """


class ValidationError(Error):
    """Exception raised when a value breaks a domain invariant
    (non-finite features, too few frames, mismatched dimensions, ...).
    """


class FormatError(Error):
    """Exception raised for malformed feature, manifest or checkpoint files.
    """


# Class to hold application specific info within the Click context.
class eaiadd_internal_object(object):
    def __init__(self, debug=False):
        self.debug = debug
