# -*- coding: utf-8 -*-
""" EAIF feature container and JSON-lines dataset manifest.

An EAIF file holds one utterance: frame-level emotion features (T x d_e),
the utterance-level emotion vector (d_e), frame-level acoustic features
(T x d_a) and the bonafide/spoof label. Layout, little-endian::

    "EAIF" | version u32 | T u32 | d_e u32 | d_a u32 | label u8
    | id length u16 | id utf-8 | emo_frames f64 | emo_utt f64 | acu_frames f64
"""

import json
import os
import struct
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .classes import FormatError, ValidationError

MAGIC = b"EAIF"
VERSION = 1
LABELS = ("bonafide", "spoof")

_HEADER = struct.Struct("<4sIIIIBH")
_F64 = np.dtype("<f8")


def label_code(label):
    try:
        return LABELS.index(label)
    except ValueError:
        raise ValidationError("unknown label '%s', expected one of %s"
                              % (label, LABELS))


def _frozen(array, ndim, name):
    array = np.array(array, dtype=np.float64, copy=True)
    if array.ndim != ndim:
        raise ValidationError("%s should be %d-dimensional, is %d-dimensional"
                              % (name, ndim, array.ndim))
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FeatureBundle:
    """One utterance worth of features. Arrays are copied and made read-only.
    """
    id: str
    emo_frames: np.ndarray
    emo_utt: np.ndarray
    acu_frames: np.ndarray
    label: str

    def __post_init__(self):
        object.__setattr__(self, "emo_frames",
                           _frozen(self.emo_frames, 2, "emo_frames"))
        object.__setattr__(self, "emo_utt",
                           _frozen(self.emo_utt, 1, "emo_utt"))
        object.__setattr__(self, "acu_frames",
                           _frozen(self.acu_frames, 2, "acu_frames"))
        validate_bundle(self)

    @property
    def n_frames(self):
        return self.emo_frames.shape[0]

    @property
    def d_e(self):
        return self.emo_frames.shape[1]

    @property
    def d_a(self):
        return self.acu_frames.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FeatureBundle):
            return NotImplemented
        return (self.id == other.id and self.label == other.label
                and np.array_equal(self.emo_frames, other.emo_frames)
                and np.array_equal(self.emo_utt, other.emo_utt)
                and np.array_equal(self.acu_frames, other.acu_frames))

    __hash__ = None


def validate_bundle(bundle):
    label_code(bundle.label)
    n_frames, d_e = bundle.emo_frames.shape
    if n_frames < 2:
        raise ValidationError("bundle '%s': T < 2 (T = %d)"
                              % (bundle.id, n_frames))
    if d_e < 1 or bundle.acu_frames.shape[1] < 1:
        raise ValidationError("bundle '%s': zero-width features (d_e = %d, "
                              "d_a = %d)" % (bundle.id, d_e,
                                             bundle.acu_frames.shape[1]))
    if bundle.acu_frames.shape[0] != n_frames:
        raise ValidationError(
            "bundle '%s': emo_frames has %d frames, acu_frames has %d"
            % (bundle.id, n_frames, bundle.acu_frames.shape[0]))
    if bundle.emo_utt.shape[0] != d_e:
        raise ValidationError(
            "bundle '%s': emo_utt has dimension %d, emo_frames has %d"
            % (bundle.id, bundle.emo_utt.shape[0], d_e))
    for name in ("emo_frames", "emo_utt", "acu_frames"):
        if not np.all(np.isfinite(getattr(bundle, name))):
            raise ValidationError("bundle '%s': non-finite value in %s"
                                  % (bundle.id, name))


def encode_bundle(bundle):
    validate_bundle(bundle)
    id_bytes = bundle.id.encode("utf-8")
    if len(id_bytes) > 0xFFFF:
        raise ValidationError("bundle id longer than 65535 bytes")
    header = _HEADER.pack(MAGIC, VERSION, bundle.n_frames, bundle.d_e,
                          bundle.d_a, label_code(bundle.label), len(id_bytes))
    return b"".join((header, id_bytes,
                     bundle.emo_frames.astype(_F64).tobytes(order="C"),
                     bundle.emo_utt.astype(_F64).tobytes(order="C"),
                     bundle.acu_frames.astype(_F64).tobytes(order="C")))


def decode_bundle(data, source="<bytes>"):
    if len(data) < _HEADER.size:
        if data[:4] != MAGIC[:len(data[:4])]:
            raise FormatError("%s: bad magic" % source)
        raise FormatError("%s: truncated header" % source)
    magic, version, n_frames, d_e, d_a, label, id_len = \
        _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError("%s: bad magic %r" % (source, magic))
    if version != VERSION:
        raise FormatError("%s: unsupported version %d" % (source, version))
    if label >= len(LABELS):
        raise FormatError("%s: unknown label code %d" % (source, label))
    offset = _HEADER.size
    n_values = n_frames * d_e + d_e + n_frames * d_a
    expected = offset + id_len + n_values * _F64.itemsize
    if len(data) < expected:
        raise FormatError("%s: truncated payload (%d of %d bytes)"
                          % (source, len(data), expected))
    if len(data) > expected:
        raise FormatError("%s: %d trailing bytes after payload"
                          % (source, len(data) - expected))
    try:
        bundle_id = bytes(data[offset:offset + id_len]).decode("utf-8")
    except UnicodeDecodeError:
        raise FormatError("%s: id is not valid UTF-8" % source)
    offset += id_len
    values = np.frombuffer(data, dtype=_F64, count=n_values, offset=offset)
    emo_frames = values[:n_frames * d_e].reshape(n_frames, d_e)
    emo_utt = values[n_frames * d_e:n_frames * d_e + d_e]
    acu_frames = values[n_frames * d_e + d_e:].reshape(n_frames, d_a)
    return FeatureBundle(bundle_id, emo_frames, emo_utt, acu_frames,
                         LABELS[label])


def save_bundle(bundle, path):
    data = encode_bundle(bundle)
    with open(path, "wb") as f:
        f.write(data)


def load_bundle(path):
    with open(path, "rb") as f:
        data = f.read()
    return decode_bundle(data, source=str(path))


@dataclass
class DatasetManifest:
    """Manifest entries are ``(path, id, label)``, paths as written in the
    manifest file (relative paths resolve against the manifest directory).
    """
    entries: List[Tuple[str, str, str]] = field(default_factory=list)
    seed: int = 0

    def __post_init__(self):
        seen = set()
        for _, bundle_id, label in self.entries:
            if bundle_id in seen:
                raise ValidationError("duplicate id '%s' in manifest"
                                      % bundle_id)
            seen.add(bundle_id)
            label_code(label)

    def __len__(self):
        return len(self.entries)


def write_manifest(manifest, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for bundle_path, bundle_id, label in manifest.entries:
            f.write(json.dumps({"id": bundle_id, "path": bundle_path,
                                "label": label}) + "\n")


def read_manifest(path):
    entries = []
    with open(path, "rb") as f:
        for lineno, raw in enumerate(f, 1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise FormatError("%s:%d: manifest line is not valid UTF-8"
                                  % (path, lineno))
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                entries.append((obj["path"], obj["id"], obj["label"]))
            except (ValueError, KeyError, TypeError) as e:
                raise FormatError("%s:%d: malformed manifest line (%s)"
                                  % (path, lineno, e))
    return DatasetManifest(entries)


def resolve_path(manifest_path, bundle_path):
    if os.path.isabs(bundle_path):
        return bundle_path
    return os.path.join(os.path.dirname(os.path.abspath(manifest_path)),
                        bundle_path)


def load_manifest(path):
    """Load every bundle of a manifest, in manifest order."""
    bundles = []
    for bundle_path, bundle_id, label in read_manifest(path).entries:
        full_path = resolve_path(path, bundle_path)
        try:
            bundle = load_bundle(full_path)
        except OSError as e:
            raise FormatError("bundle '%s': cannot read %s (%s)"
                              % (bundle_id, full_path, e.strerror or e))
        except (FormatError, ValidationError) as e:
            raise type(e)("bundle '%s': %s" % (bundle_id, e))
        if bundle.id != bundle_id or bundle.label != label:
            raise ValidationError(
                "bundle '%s': file %s holds id '%s' label '%s'"
                % (bundle_id, full_path, bundle.id, bundle.label))
        bundles.append(bundle)
    return bundles
