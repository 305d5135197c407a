# -*- coding: utf-8 -*-
""" Synthetic bonafide / spoof feature generator.

Bonafide streams are two fixed linear images of one smooth latent
trajectory, so their frame-to-frame change magnitudes move together. Spoof
streams follow two independent latents through the same maps and receive
unmatched jumps in one stream only.
"""

import os
from dataclasses import dataclass

import numpy as np

from .classes import ValidationError
from .feature_store import (DatasetManifest, FeatureBundle, label_code,
                            save_bundle, write_manifest)

SMOOTHING_WINDOW = 5
# rng key tag of the dataset-wide stream maps
MAP_KEY = 0x6d6170


@dataclass(frozen=True)
class SynthConfig:
    n_frames: int = 64
    d_e: int = 16
    d_a: int = 16
    noise_sigma: float = 0.05
    burst_rate: float = 0.15
    burst_scale: float = 1.0
    seed: int = 0
    latent_dim: int = 4
    walk_scale: float = 1.0
    map_seed: int = 0

    def __post_init__(self):
        errors = []
        if self.n_frames < 8:
            errors.append("T must be >= 8, is %d" % self.n_frames)
        if self.d_e < 1 or self.d_a < 1:
            errors.append("feature dimensions must be >= 1")
        if self.latent_dim < 1 or self.latent_dim > min(self.d_e, self.d_a):
            errors.append("latent_dim must be in [1, min(d_e, d_a)], is %d"
                          % self.latent_dim)
        if not 0.0 <= self.burst_rate <= 1.0:
            errors.append("burst_rate must be in [0, 1], is %s"
                          % self.burst_rate)
        if not (np.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            errors.append("noise_sigma must be finite and >= 0, is %s"
                          % self.noise_sigma)
        if not (np.isfinite(self.burst_scale) and self.burst_scale > 0):
            errors.append("burst_scale must be finite and > 0, is %s"
                          % self.burst_scale)
        if not (np.isfinite(self.walk_scale) and self.walk_scale > 0):
            errors.append("walk_scale must be finite and > 0, is %s"
                          % self.walk_scale)
        if self.seed < 0:
            errors.append("seed must be unsigned, is %d" % self.seed)
        if self.map_seed < 0:
            errors.append("map_seed must be unsigned, is %d" % self.map_seed)
        if errors:
            raise ValidationError("invalid synth config: " + "; ".join(errors))


def bundle_rng(seed, label, index):
    """Per-bundle generator; depends only on (seed, label, index)."""
    return np.random.default_rng([seed, label_code(label), index])


def _latent(cfg, rng):
    # random walk smoothed by a moving average, trimmed back to T frames
    steps = rng.normal(0.0, cfg.walk_scale,
                       size=(cfg.n_frames + SMOOTHING_WINDOW - 1,
                             cfg.latent_dim))
    walk = np.cumsum(steps, axis=0)
    windows = np.lib.stride_tricks.sliding_window_view(
        walk, SMOOTHING_WINDOW, axis=0)
    return windows.mean(axis=-1)


def _linear_map(latent_dim, out_dim, rng):
    # orthonormal rows, so ||z @ A|| == ||z|| and change magnitudes of two
    # images of the same latent are identical
    q, _ = np.linalg.qr(rng.normal(size=(out_dim, latent_dim)))
    return q.T


def stream_maps(cfg):
    """The two linear maps (latent -> emotion, latent -> acoustic) shared by
    every bundle generated with the same map_seed and dimensions.

    They do not depend on ``cfg.seed``, so a held-out split drawn with a
    fresh seed lives in the same feature space as the training split."""
    rng = np.random.default_rng([MAP_KEY, cfg.map_seed])
    return (_linear_map(cfg.latent_dim, cfg.d_e, rng),
            _linear_map(cfg.latent_dim, cfg.d_a, rng))


def _utterance_vector(emo_frames, cfg, rng):
    return emo_frames.mean(axis=0) + rng.normal(0.0, cfg.noise_sigma,
                                                size=cfg.d_e)


def gen_bonafide(cfg, rng, bundle_id="bonafide"):
    map_e, map_a = stream_maps(cfg)
    latent = _latent(cfg, rng)
    emo = latent @ map_e + rng.normal(0.0, cfg.noise_sigma,
                                      size=(cfg.n_frames, cfg.d_e))
    acu = latent @ map_a + rng.normal(0.0, cfg.noise_sigma,
                                      size=(cfg.n_frames, cfg.d_a))
    utt = _utterance_vector(emo, cfg, rng)
    return FeatureBundle(bundle_id, emo, utt, acu, "bonafide")


def _bursts(cfg, rng):
    """Cumulative jump offsets (T x d_e, T x d_a); each jump lands in
    exactly one of the two streams and persists from its frame onwards."""
    jumps_e = np.zeros((cfg.n_frames, cfg.d_e))
    jumps_a = np.zeros((cfg.n_frames, cfg.d_a))
    hit = rng.random(cfg.n_frames) < cfg.burst_rate
    hit[0] = False
    to_emotion = rng.random(cfg.n_frames) < 0.5
    for t in np.flatnonzero(hit):
        target = jumps_e if to_emotion[t] else jumps_a
        direction = rng.normal(size=target.shape[1])
        direction /= np.linalg.norm(direction)
        target[t] = cfg.burst_scale * direction
    return np.cumsum(jumps_e, axis=0), np.cumsum(jumps_a, axis=0)


def gen_spoof(cfg, rng, bundle_id="spoof"):
    map_e, map_a = stream_maps(cfg)
    latent_e = _latent(cfg, rng)
    latent_a = _latent(cfg, rng)
    burst_e, burst_a = _bursts(cfg, rng)
    emo = latent_e @ map_e + burst_e + rng.normal(
        0.0, cfg.noise_sigma, size=(cfg.n_frames, cfg.d_e))
    acu = latent_a @ map_a + burst_a + rng.normal(
        0.0, cfg.noise_sigma, size=(cfg.n_frames, cfg.d_a))
    utt = _utterance_vector(emo, cfg, rng)
    return FeatureBundle(bundle_id, emo, utt, acu, "spoof")


def generate(cfg, label, index):
    bundle_id = "%s_%04d" % (label, index)
    rng = bundle_rng(cfg.seed, label, index)
    if label == "bonafide":
        return gen_bonafide(cfg, rng, bundle_id)
    return gen_spoof(cfg, rng, bundle_id)


def gen_bundles(cfg, n_bonafide, n_spoof):
    """In-memory dataset, bonafide first; same bundles as gen_dataset."""
    if n_bonafide < 0 or n_spoof < 0:
        raise ValidationError("bundle counts must be >= 0")
    return ([generate(cfg, "bonafide", i) for i in range(n_bonafide)]
            + [generate(cfg, "spoof", i) for i in range(n_spoof)])


def gen_dataset(cfg, n_bonafide, n_spoof, out_dir,
                manifest_name="manifest.jsonl"):
    """Write EAIF files and a manifest into out_dir; returns the manifest."""
    bundles = gen_bundles(cfg, n_bonafide, n_spoof)
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for bundle in bundles:
        file_name = bundle.id + ".eaif"
        save_bundle(bundle, os.path.join(out_dir, file_name))
        entries.append((file_name, bundle.id, bundle.label))
    manifest = DatasetManifest(entries, seed=cfg.seed)
    write_manifest(manifest, os.path.join(out_dir, manifest_name))
    return manifest
