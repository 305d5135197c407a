# -*- coding: utf-8 -*-
""" Emotion-acoustic inconsistency modelling.

* Variation amplification loss: each frame's emotion change is pulled
  towards a context-weighted prototype of neighbouring changes and pushed
  away from changes of far-apart frames and of shuffled frame orders
  (InfoNCE over cosine similarities).
* Hierarchical inconsistency graph: a temporal graph attention layer over
  emotion frames, then two heterogeneous stages (frames + utterance node,
  then frames + acoustic frames) and a mean/max readout.

Graph layers work on dense ``(N, N)`` boolean masks; every node has a
self-loop, so every softmax row is well defined.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from .classes import ValidationError
from .tensors import DTYPE, uniform_fan_in_

LEAKY_SLOPE = 0.2
EXP_CLAMP = 30.0
COSINE_EPS = 1e-8


@dataclass(frozen=True)
class EvalConfig:
    k: int = 3
    tau: float = 0.5
    tau_nce: float = 0.1
    n_neg_far: int = 4
    n_neg_shuffle: int = 4
    far_margin: Optional[int] = None

    def __post_init__(self):
        if self.far_margin is None:
            object.__setattr__(self, "far_margin", max(2 * self.k + 1, 8))
        errors = []
        if self.k < 1:
            errors.append("k must be >= 1, is %d" % self.k)
        if self.far_margin <= self.k:
            errors.append("far_margin must exceed k (%d <= %d)"
                          % (self.far_margin, self.k))
        if not self.tau > 0 or not self.tau_nce > 0:
            errors.append("temperatures must be > 0")
        if self.n_neg_far < 0 or self.n_neg_shuffle < 0:
            errors.append("negative counts must be >= 0")
        if errors:
            raise ValidationError("invalid EVAL config: " + "; ".join(errors))


def temporal_diffs(f):
    """Row j is f[j+1] - f[j]."""
    if f.shape[0] < 2:
        raise ValidationError("temporal_diffs: T < 2")
    return f[1:] - f[:-1]


def prototypes(diffs, f1, u_p, cfg):
    """Prototype g_t for every t in 0..T-2, rows stacked."""
    n = diffs.shape[0]
    logits = torch.clamp(f1[:n] @ u_p / cfg.tau, -EXP_CLAMP, EXP_CLAMP)
    idx = torch.arange(n)
    window = (idx[:, None] - idx[None, :]).abs() <= cfg.k
    alpha = torch.exp(logits)[None, :] * window
    return (alpha @ diffs) / alpha.sum(dim=1, keepdim=True)


def prototype(diffs, f1, u_p, t, cfg):
    if not 0 <= t < diffs.shape[0]:
        raise ValidationError("prototype: index %d outside 0..%d"
                              % (t, diffs.shape[0] - 1))
    return prototypes(diffs, f1, u_p, cfg)[t]


def negative_pairs(n_frames, t, cfg, rng):
    """Frame index pairs (a, b); each negative is f[a] - f[b].

    Far negatives are diffs j with |j - t| > far_margin, drawn without
    replacement (all of them when fewer exist); shuffle negatives are
    consecutive pairs of a random permutation of the frames."""
    n_diffs = n_frames - 1
    far = np.flatnonzero(np.abs(np.arange(n_diffs) - t) > cfg.far_margin)
    if far.size > cfg.n_neg_far:
        far = rng.choice(far, size=cfg.n_neg_far, replace=False)
    pairs = [(j + 1, j) for j in far]
    for _ in range(cfg.n_neg_shuffle):
        perm = rng.permutation(n_frames)
        i = rng.integers(n_frames - 1)
        pairs.append((int(perm[i + 1]), int(perm[i])))
    return pairs


def _prefix(diffs):
    # prefix[m] == f[m] - f[0]
    return torch.cat((diffs.new_zeros(1, diffs.shape[1]),
                      torch.cumsum(diffs, dim=0)))


def sample_negatives(diffs, t, cfg, rng):
    prefix = _prefix(diffs)
    return [prefix[a] - prefix[b]
            for a, b in negative_pairs(diffs.shape[0] + 1, t, cfg, rng)]


def cosine(a, b):
    """Cosine similarity along the last axis; norms are
    sqrt(||x||^2 + eps^2) so zero vectors give 0, not NaN."""
    na = torch.sqrt((a * a).sum(-1) + COSINE_EPS ** 2)
    nb = torch.sqrt((b * b).sum(-1) + COSINE_EPS ** 2)
    return (a * b).sum(-1) / (na * nb)


def eval_loss(f_emo_p, f1, u_p, cfg, rng):
    """Mean InfoNCE over frames t = 0..T-2.

    Negatives for every t are drawn first, in order of t, so the result
    depends only on the inputs and the generator state."""
    diffs = temporal_diffs(f_emo_p)
    n = diffs.shape[0]
    g = prototypes(diffs, f1, u_p, cfg)
    per_t = [negative_pairs(n + 1, t, cfg, rng) for t in range(n)]
    width = max(map(len, per_t))
    if width == 0:
        return diffs.new_zeros(())
    a = np.zeros((n, width), dtype=np.int64)
    b = np.zeros((n, width), dtype=np.int64)
    valid = np.zeros((n, width), dtype=bool)
    for t, pairs in enumerate(per_t):
        for i, (a_i, b_i) in enumerate(pairs):
            a[t, i], b[t, i], valid[t, i] = a_i, b_i, True
    prefix = _prefix(diffs)
    negatives = prefix[torch.from_numpy(a)] - prefix[torch.from_numpy(b)]
    positive = cosine(diffs, g) / cfg.tau_nce
    negative = cosine(diffs[:, None, :], negatives) / cfg.tau_nce
    negative = negative.masked_fill(~torch.from_numpy(valid), -np.inf)
    logits = torch.cat((positive[:, None], negative), dim=1)
    return (torch.logsumexp(logits, dim=1) - positive).mean()


class GraphAttention(nn.Module):
    """Single-head graph attention: e_ij = LeakyReLU(a . [W x_i || W x_j]),
    softmax over the neighbours of i, ELU(sum_j alpha_ij W x_j).
    With ``attention=False`` the neighbours are averaged uniformly."""

    def __init__(self, dim, attention=True):
        super().__init__()
        self.attention = attention
        self.W = nn.Linear(dim, dim, bias=False, dtype=DTYPE)
        self.a = nn.Parameter(torch.zeros(2 * dim, dtype=DTYPE))

    def reset_parameters_(self, gen):
        uniform_fan_in_(self.a, self.a.shape[0], gen)

    def forward(self, x, mask):
        z = self.W(x)
        d = z.shape[1]
        logits = F.leaky_relu((z @ self.a[:d])[:, None]
                              + (z @ self.a[d:])[None, :], LEAKY_SLOPE)
        alpha = masked_softmax(logits, mask, self.attention)
        return F.elu(alpha @ z), alpha


class HeteroGraphAttention(nn.Module):
    """Graph attention over two node types: a transform per type, and an
    attention vector per type pair (type 0 - type 0, type 1 - type 1,
    and one shared by both cross-type directions)."""

    def __init__(self, dim, attention=True):
        super().__init__()
        self.attention = attention
        self.W0 = nn.Linear(dim, dim, bias=False, dtype=DTYPE)
        self.W1 = nn.Linear(dim, dim, bias=False, dtype=DTYPE)
        self.a00 = nn.Parameter(torch.zeros(2 * dim, dtype=DTYPE))
        self.a11 = nn.Parameter(torch.zeros(2 * dim, dtype=DTYPE))
        self.a01 = nn.Parameter(torch.zeros(2 * dim, dtype=DTYPE))

    def reset_parameters_(self, gen):
        for a in (self.a00, self.a11, self.a01):
            uniform_fan_in_(a, a.shape[0], gen)

    def forward(self, x, node_type, mask):
        is_1 = node_type.bool()
        z = torch.where(is_1[:, None], self.W1(x), self.W0(x))
        d = z.shape[1]

        def pair_logits(a):
            return (z @ a[:d])[:, None] + (z @ a[d:])[None, :]

        same_0 = ~is_1[:, None] & ~is_1[None, :]
        same_1 = is_1[:, None] & is_1[None, :]
        logits = torch.where(same_0, pair_logits(self.a00),
                             torch.where(same_1, pair_logits(self.a11),
                                         pair_logits(self.a01)))
        alpha = masked_softmax(F.leaky_relu(logits, LEAKY_SLOPE), mask,
                               self.attention)
        return F.elu(alpha @ z), alpha


def masked_softmax(logits, mask, attention=True):
    if not attention:
        weights = mask.to(logits.dtype)
        return weights / weights.sum(dim=1, keepdim=True)
    return torch.softmax(logits.masked_fill(~mask, -np.inf), dim=1)


def temporal_mask(n_frames):
    idx = torch.arange(n_frames)
    return (idx[:, None] - idx[None, :]).abs() <= 1


def stage1_mask(n_frames):
    """Frames 0..T-1 plus the utterance node T: temporal edges, every
    frame <-> utterance, self-loops."""
    mask = torch.ones(n_frames + 1, n_frames + 1, dtype=torch.bool)
    mask[:n_frames, :n_frames] = temporal_mask(n_frames)
    return mask


def stage2_mask(n_frames):
    """Emotion frames 0..T-1 and acoustic frames T..2T-1: temporal edges
    within each type, emotion t <-> acoustic t, self-loops."""
    mask = torch.zeros(2 * n_frames, 2 * n_frames, dtype=torch.bool)
    temporal = temporal_mask(n_frames)
    mask[:n_frames, :n_frames] = temporal
    mask[n_frames:, n_frames:] = temporal
    idx = torch.arange(n_frames)
    mask[idx, idx + n_frames] = True
    mask[idx + n_frames, idx] = True
    return mask


class HigParams(nn.Module):
    def __init__(self, dim, attention=True):
        super().__init__()
        self.gat1 = GraphAttention(dim, attention)
        self.hg1 = HeteroGraphAttention(dim, attention)
        self.hg2 = HeteroGraphAttention(dim, attention)


def gat_frame(f_emo_p, hig):
    out, _ = hig.gat1(f_emo_p, temporal_mask(f_emo_p.shape[0]))
    return out


def readout(frames):
    return torch.cat((frames.mean(dim=0), frames.max(dim=0).values))


def hig_forward(f1, u_p, f_acu_p, hig):
    """Returns (stage-2 emotion frame outputs, readout of size 2 d_model)."""
    n = f1.shape[0]
    if f_acu_p.shape != f1.shape or u_p.shape != f1.shape[1:]:
        raise ValidationError("hig_forward: inconsistent shapes %s, %s, %s"
                              % (tuple(f1.shape), tuple(u_p.shape),
                                 tuple(f_acu_p.shape)))
    types1 = torch.cat((torch.zeros(n, dtype=torch.long),
                        torch.ones(1, dtype=torch.long)))
    stage1, _ = hig.hg1(torch.cat((f1, u_p[None, :])), types1,
                        stage1_mask(n))
    types2 = torch.cat((torch.zeros(n, dtype=torch.long),
                        torch.ones(n, dtype=torch.long)))
    stage2, _ = hig.hg2(torch.cat((stage1[:n], f_acu_p)), types2,
                        stage2_mask(n))
    f_tilde = stage2[:n]
    return f_tilde, readout(f_tilde)
