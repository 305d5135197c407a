# -*- coding: utf-8 -*-
""" Helper functions for the EAI-ADD command line tool.
"""

import json
import os

from pyaml import yaml

from .classes import ConfigError, Error, Errors, ValidationError
from .config import (decode_bool, decode_choice, decode_float, decode_int,
                     decode_obj, decode_optional, decode_range, decode_string)
from .metrics import TdcfParams


def _positive_int(low=1):
    return decode_optional(decode_range(decode_int, low=low))


def _float(low=None, high=None, low_open=False):
    return decode_optional(decode_range(decode_float, low=low, high=high,
                                        low_open=low_open))


_path = decode_optional(decode_string)
_flag = decode_optional(decode_bool)

# keys holding file or directory paths; relative values resolve against the
# directory of the config file
PATH_KEYS = frozenset(("out_dir", "manifest", "out", "history", "tdcf_params"))


def _eval_keys():
    return {
        "k": _positive_int(),
        "tau": _float(0, low_open=True),
        "tau_nce": _float(0, low_open=True),
        "n_neg_far": _positive_int(0),
        "n_neg_shuffle": _positive_int(0),
        "far_margin": _positive_int(),
    }


def get_config_parser():
    """Decoder for the whole config file; every key is optional."""
    return decode_obj({
        "synth": decode_optional(decode_obj({
            "out_dir": _path,
            "num_bonafide": _positive_int(0),
            "num_spoof": _positive_int(0),
            "frames": _positive_int(8),
            "d_e": _positive_int(),
            "d_a": _positive_int(),
            "noise_sigma": _float(0),
            "burst_rate": _float(0, 1),
            "burst_scale": _float(0, low_open=True),
            "latent_dim": _positive_int(),
            "seed": _positive_int(0),
            "map_seed": _positive_int(0),
        })),
        "train": decode_optional(decode_obj(dict(_eval_keys(), **{
            "manifest": _path,
            "out": _path,
            "history": _path,
            "epochs": _positive_int(),
            "learning_rate": _float(0, low_open=True),
            "weight_decay": _float(0),
            "batch_size": _positive_int(),
            "d_model": _positive_int(),
            "seed": _positive_int(0),
            "no_eaam": _flag,
            "no_eval": _flag,
            "no_hig": _flag,
            "linear_streams": _flag,
            "graph_layer": decode_optional(decode_choice("gat", "gcn")),
        }))),
        "eval": decode_optional(decode_obj({
            "manifest": _path,
            "tdcf_params": _path,
            "out": _path,
        })),
        "analyze": decode_optional(decode_obj({
            "manifest": _path,
            "out_dir": _path,
        })),
        "gradcheck": decode_optional(decode_obj({
            "seed": _positive_int(0),
            "frames": _positive_int(2),
            "d_model": _positive_int(),
            "k": _positive_int(),
        })),
    })


def read_config_file(file):
    """
    Read configuration values from a YAML file object.
    """
    try:
        file_content = "".join(file.readlines())
        return yaml.safe_load(file_content)
    except yaml.YAMLError as e:
        raise ConfigError([Error("%s: not valid YAML (%s)"
                                 % (getattr(file, "name", "<config>"), e))])


def _errors_of(decoded):
    if isinstance(decoded, Errors):
        return [err for e in decoded.errors for err in _errors_of(e)]
    return [decoded]


def load_config(file):
    """
    Load the config file into a Click ``default_map``: one dict per
    subcommand, holding only the keys the file sets. Relative paths are
    made relative to the config file's directory.
    """
    content = read_config_file(file)
    if content is None:
        return {}
    name = getattr(file, "name", "<config>")
    config = get_config_parser()(os.path.basename(name), content)
    if isinstance(config, Error):
        raise ConfigError(_errors_of(config))
    base = os.path.dirname(name) if os.path.isfile(name) else ""
    default_map = {}
    for command, section in vars(config).items():
        if section is None:
            continue
        values = {k: (os.path.join(base, v) if k in PATH_KEYS else v)
                  for k, v in vars(section).items() if v is not None}
        if values:
            default_map[command] = values
    return default_map


def get_tdcf_parser():
    rate = decode_range(decode_float, 0, 1)
    positive = decode_range(decode_float, 0, low_open=True)
    return decode_obj({
        "p_target": rate,
        "p_nontarget": rate,
        "p_spoof": rate,
        "c_miss_asv": positive,
        "c_fa_asv": positive,
        "c_miss_cm": positive,
        "c_fa_cm": positive,
        "p_fa_asv": rate,
        "p_miss_asv": rate,
        "p_miss_spoof_asv": rate,
    })


def load_tdcf_params(path):
    """t-DCF cost model from a YAML (or JSON) file; every key is required."""
    with open(path, "r", encoding="utf-8") as f:
        content = read_config_file(f)
    decoded = get_tdcf_parser()(os.path.basename(path), content)
    if isinstance(decoded, Error):
        raise ConfigError(_errors_of(decoded))
    try:
        return TdcfParams(**vars(decoded))
    except ValidationError as e:
        raise ConfigError([Error("%s: %s" % (path, e))])


def write_json(data, path=None):
    """Stable JSON text (sorted keys, trailing newline); written to path
    when given."""
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    return text


# Origin of every training default: "published" when the published
# training recipe states it, "chosen" when this tool picks it.
DEFAULT_PROVENANCE = [
    ("epochs", 60, "published"),
    ("learning_rate", 1e-5, "published"),
    ("weight_decay", 1e-4, "published"),
    ("k", 3, "published"),
    ("batch_size", 8, "chosen"),
    ("d_model", 32, "chosen"),
    ("tau", 0.5, "chosen"),
    ("tau_nce", 0.1, "chosen"),
    ("n_neg_far", 4, "chosen"),
    ("n_neg_shuffle", 4, "chosen"),
    ("far_margin", "max(2k+1, 8)", "chosen"),
    ("sinc_taps", 17, "chosen"),
]
