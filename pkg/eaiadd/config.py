""" Combinator decoders for the YAML config and t-DCF parameter files.

Every decoder takes ``(key, value)`` and returns either the decoded value or
an ``Error`` describing what is wrong with ``key``; errors are returned, not
raised, so ``decode_obj`` can collect all of them in one pass.
"""

import math
from types import SimpleNamespace

from .classes import Error, Errors


# Fails unless None was given; the fallback branch of decode_optional
# Useful for setting default with decode_one_of in decode_obj
def decode_default(default):
    def _decode_const(key, value):
        if value is None:
            return default
        else:
            return Error("Not using default [%s]." % default)
    return _decode_const


def decode_int(key, value):
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    else:
        return Error("'%s' should be int, is: '%s'"
                     % (key, type(value).__name__))


# ints are accepted where floats are expected, YAML writes 1 not 1.0
def decode_float(key, value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if not math.isfinite(value):
            return Error("'%s' should be finite, is: '%s'" % (key, value))
        return float(value)
    else:
        return Error("'%s' should be float, is: '%s'"
                     % (key, type(value).__name__))


def decode_bool(key, value):
    if isinstance(value, bool):
        return value
    else:
        return Error("'%s' should be bool, is: '%s'"
                     % (key, type(value).__name__))


def decode_string(key, value):
    if type(value) is str:
        return value
    else:
        return Error("'%s' should be string, is: '%s'"
                     % (key, type(value).__name__))


# Bounds check on top of another decoder; open bounds exclude the limit
def decode_range(decoder, low=None, high=None, low_open=False,
                 high_open=False):
    def _decode_range(key, value):
        ret = decoder(key, value)
        if isinstance(ret, Error):
            return ret
        if low is not None and (ret < low or (low_open and ret == low)):
            return Error("'%s' should be %s %s, is: '%s'"
                         % (key, ">" if low_open else ">=", low, ret))
        if high is not None and (ret > high or (high_open and ret == high)):
            return Error("'%s' should be %s %s, is: '%s'"
                         % (key, "<" if high_open else "<=", high, ret))
        return ret
    return _decode_range


# give a dict of keys and their respective decoding function
# a missing key is treated as None, but missing key is
# reported on fail. Unknown keys are reported as well.
def decode_obj(keys, strict=True):
    def _decode_obj(key, value):
        decoded = {}
        errors = []
        if isinstance(value, dict):
            for _key, decoder in keys.items():
                if _key in value:
                    _value = decoder("%s.%s" % (key, _key), value[_key])
                    if isinstance(_value, Error):
                        errors.append(_value)
                else:
                    _value = decoder("%s.%s" % (key, _key), None)
                    if isinstance(_value, Error):
                        errors.append(Error("'%s' missing key: '%s'"
                                            % (key, _key)))
                decoded[_key] = _value
            if strict:
                for _key in value:
                    if _key not in keys:
                        errors.append(Error("'%s' unknown key: '%s'"
                                            % (key, _key)))
        else:
            return Error("'%s' should be dict, is: '%s'"
                         % (key, type(value).__name__))
        if errors:
            return Errors(errors)
        return SimpleNamespace(**decoded)
    return _decode_obj


def decode_choice(*choices):
    def _decode_choice(key, value):
        if value in choices:
            return value
        else:
            return Error("'%s' should be one of %s, is: '%s'"
                         % (key, choices, value))
    return _decode_choice


# tries out the list of decoders and returns the first
# successful one
def decode_one_of(*decoders):
    def _decode_one_of(key, value):
        errors = []
        for decoder in decoders:
            ret = decoder(key, value)
            if isinstance(ret, Error):
                errors.append(ret)
            else:
                return ret
        else:
            error = Error("All attempts failed for '%s':" % key)
            return Errors([error] + errors)
    return _decode_one_of


# optional key: missing or null yields None
def decode_optional(decoder):
    return decode_one_of(decoder, decode_default(None))
