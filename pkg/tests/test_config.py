from eaiadd.classes import Error, Errors
from eaiadd.config import (decode_bool, decode_choice, decode_default,
                           decode_float, decode_int, decode_obj,
                           decode_one_of, decode_optional, decode_range,
                           decode_string)


def is_error(o):
    return isinstance(o, Error)


def test_decode_string():
    assert decode_string("", "abc") == "abc"
    assert is_error(decode_string("", {}))
    assert is_error(decode_string("", 42))


def test_decode_int():
    assert decode_int("", 1) == 1
    assert is_error(decode_int("", {}))
    assert is_error(decode_int("", "42"))
    assert is_error(decode_int("", True))


def test_decode_float():
    assert decode_float("", 1) == 1.0
    assert isinstance(decode_float("", 1), float)
    assert decode_float("", 2.5) == 2.5
    assert is_error(decode_float("", float("nan")))
    assert is_error(decode_float("", float("inf")))
    assert is_error(decode_float("", "1.0"))
    assert is_error(decode_float("", False))


def test_decode_bool():
    assert decode_bool("", True) is True
    assert is_error(decode_bool("", 1))


def test_decode_default():
    sentinel = Error()
    assert decode_default(sentinel)("", None) is sentinel
    assert is_error(decode_default(sentinel)("", "abc"))
    assert decode_default(sentinel)("", "abc") is not sentinel


def test_decode_range():
    positive = decode_range(decode_float, 0, low_open=True)
    assert positive("", 0.5) == 0.5
    assert is_error(positive("", 0))
    assert is_error(positive("", -1))
    rate = decode_range(decode_float, 0, 1)
    assert rate("", 0) == 0.0
    assert rate("", 1) == 1.0
    assert is_error(rate("", 1.5))
    assert is_error(decode_range(decode_int, 1)("", "x"))


def test_decode_one_of():
    decoder = decode_one_of(decode_int, decode_string)
    assert decoder("", 123) == 123
    assert decoder("", "abc") == "abc"
    failed = decoder("", [123])
    assert isinstance(failed, Errors)
    assert len(failed.errors) == 3


def test_decode_optional():
    decoder = decode_optional(decode_int)
    assert decoder("", None) is None
    assert decoder("", 3) == 3
    assert is_error(decoder("", "3"))


def test_decode_choice():
    assert decode_choice("gat", "gcn")("", "gcn") == "gcn"
    assert is_error(decode_choice("gat", "gcn")("", "gin"))


def test_decode_obj():
    assert vars(decode_obj({'x': decode_int})("", {'x': 42})) == {'x': 42}
    assert is_error(decode_obj({'x': decode_string})("", {'x': 42}))
    assert is_error(decode_obj({'x': decode_string})("", {}))
    assert is_error(decode_obj({'x': decode_int})("", [42]))


def test_decode_obj_optional_keys_default_to_none():
    decoded = decode_obj({'x': decode_optional(decode_int)})("", {})
    assert decoded.x is None


def test_decode_obj_reports_every_problem():
    decoder = decode_obj({'x': decode_int, 'y': decode_string})
    decoded = decoder("cfg", {'x': "a", 'y': 1, 'z': 0})
    assert isinstance(decoded, Errors)
    messages = [str(e) for e in decoded.errors]
    assert len(messages) == 3
    assert any("unknown key: 'z'" in m for m in messages)
    assert any("'cfg.x'" in m for m in messages)


def test_decode_obj_lenient_ignores_unknown_keys():
    decoded = decode_obj({'x': decode_int}, strict=False)("", {'x': 1, 'y': 2})
    assert vars(decoded) == {'x': 1}
