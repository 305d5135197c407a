# -*- coding: utf-8 -*-
""" Full detector: alignment -> frame GAT -> hierarchical graph -> classifier,
plus the uncertainty-weighted objective and the EAIM checkpoint format.

    total = ce + exp(-s) * eval + s,   s = log sigma^2 (trainable)
"""

import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from .classes import FormatError, ValidationError
from .eaam import AlignedFeatures, EaamParams, eaam_forward
from .eaimm import EvalConfig, HigParams, eval_loss, gat_frame, hig_forward
from .feature_store import label_code
from .tensors import DTYPE, generator, init_module_, to_tensor

CHECKPOINT_MAGIC = b"EAIM"
CHECKPOINT_VERSION = 1
_CKPT_HEADER = struct.Struct("<4sIIIII5BI")


@dataclass(frozen=True)
class ModelConfig:
    d_e: int = 16
    d_a: int = 16
    d_model: int = 32
    sinc_taps: int = 17
    use_eaam: bool = True
    linear_streams: bool = False
    use_hig: bool = True
    graph_layer: str = "gat"
    use_eval: bool = True

    def __post_init__(self):
        if min(self.d_e, self.d_a, self.d_model) < 1:
            raise ValidationError("model dimensions must be >= 1")
        if self.graph_layer not in ("gat", "gcn"):
            raise ValidationError("graph_layer must be 'gat' or 'gcn', is '%s'"
                                  % self.graph_layer)
        if self.sinc_taps < 1 or self.sinc_taps % 2 == 0:
            raise ValidationError("sinc_taps must be odd and positive")

    @property
    def d_readout(self):
        return 2 * self.d_model if self.use_hig else self.d_model


class ModelParameters(nn.Module):
    """All learnable weights: ``eaam``, ``hig``, ``classifier`` and ``s``."""

    def __init__(self, config):
        super().__init__()
        self.config = config
        self.eaam = EaamParams(config.d_e, config.d_a, config.d_model,
                               config.sinc_taps,
                               linear_streams=(config.linear_streams
                                               or not config.use_eaam),
                               align=config.use_eaam)
        self.hig = HigParams(config.d_model,
                             attention=config.graph_layer == "gat") \
            if config.use_hig else None
        self.classifier = nn.Linear(config.d_readout, 2, dtype=DTYPE)
        self.s = nn.Parameter(torch.zeros((), dtype=DTYPE),
                              requires_grad=config.use_eval)

    def reset_parameters_(self, gen):
        with torch.no_grad():
            self.s.zero_()

    def constrain_(self):
        self.eaam.constrain_()

    def groups(self):
        """Parameter group name -> list of (name, parameter)."""
        groups = {}
        for name, p in self.named_parameters():
            groups.setdefault(group_of(name), []).append((name, p))
        return groups


def group_of(name):
    parts = name.split(".")
    if parts[0] == "eaam":
        if parts[-1] in ("f_low", "f_high"):
            return "eaam.sinc_cutoffs"
        return "eaam." + parts[1]
    if parts[0] == "hig":
        return "hig." + parts[1]
    return parts[0]


def init_parameters(config, seed):
    params = ModelParameters(config)
    init_module_(params, generator(seed))
    return params


@dataclass
class Diagnostics:
    aligned: AlignedFeatures
    f1: Optional[torch.Tensor]
    f_tilde: Optional[torch.Tensor]
    h: torch.Tensor


@dataclass
class LossBreakdown:
    ce: float
    eval: float
    s: float
    total: float

    def to_dict(self):
        return {"ce": self.ce, "eval": self.eval, "s": self.s,
                "total": self.total}


def bundle_tensors(bundle):
    return (to_tensor(bundle.emo_frames), to_tensor(bundle.emo_utt),
            to_tensor(bundle.acu_frames))


def check_bundle(bundle, config):
    if bundle.d_e != config.d_e or bundle.d_a != config.d_a:
        raise ValidationError(
            "bundle '%s' has d_e=%d, d_a=%d; model expects d_e=%d, d_a=%d"
            % (bundle.id, bundle.d_e, bundle.d_a, config.d_e, config.d_a))


def forward(bundle, params):
    """Returns (logits of shape (2,): [bonafide, spoof], Diagnostics)."""
    check_bundle(bundle, params.config)
    aligned = eaam_forward(*bundle_tensors(bundle), params.eaam)
    if params.hig is not None:
        f1 = gat_frame(aligned.f_emo_p, params.hig)
        f_tilde, h = hig_forward(f1, aligned.u_p, aligned.f_acu_p,
                                 params.hig)
    else:
        f1 = f_tilde = None
        h = aligned.f_emo_p.mean(dim=0)
    return params.classifier(h), Diagnostics(aligned, f1, f_tilde, h)


def loss_terms(bundle, params, cfg, rng):
    """Differentiable (total, ce, eval) tensors."""
    logits, diag = forward(bundle, params)
    target = torch.tensor([label_code(bundle.label)])
    ce = F.cross_entropy(logits[None, :], target)
    if params.config.use_eval:
        # without the graph, the prototype weights come from the aligned
        # frames themselves
        f1 = diag.f1 if diag.f1 is not None else diag.aligned.f_emo_p
        ev = eval_loss(diag.aligned.f_emo_p, f1, diag.aligned.u_p, cfg, rng)
    else:
        ev = logits.new_zeros(())
    total = ce + torch.exp(-params.s) * ev + params.s
    return total, ce, ev


def total_loss(bundle, params, cfg, rng):
    with torch.no_grad():
        total, ce, ev = loss_terms(bundle, params, cfg, rng)
    return LossBreakdown(ce=ce.item(), eval=ev.item(), s=params.s.item(),
                         total=total.item())


def backward(bundle, params, cfg, rng):
    """Gradient of the total loss for every parameter, by name; parameters
    the loss does not reach get zeros."""
    named = [(n, p) for n, p in params.named_parameters() if p.requires_grad]
    total, _, _ = loss_terms(bundle, params, cfg, rng)
    grads = torch.autograd.grad(total, [p for _, p in named],
                                allow_unused=True)
    return {n: (g if g is not None else torch.zeros_like(p))
            for (n, p), g in zip(named, grads)}


def score(bundle, params):
    """logit(bonafide) - logit(spoof); higher means more bonafide."""
    with torch.no_grad():
        logits, _ = forward(bundle, params)
    return float(logits[0] - logits[1])


def save_checkpoint(params, path):
    c = params.config
    tensors = list(params.state_dict().values())
    header = _CKPT_HEADER.pack(
        CHECKPOINT_MAGIC, CHECKPOINT_VERSION, c.d_e, c.d_a, c.d_model,
        c.sinc_taps, c.use_eaam, c.linear_streams, c.use_hig,
        c.graph_layer == "gat", c.use_eval, len(tensors))
    with open(path, "wb") as f:
        f.write(header)
        for t in tensors:
            f.write(t.detach().numpy().astype("<f8").tobytes(order="C"))


def load_checkpoint(path):
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < _CKPT_HEADER.size:
        raise FormatError("%s: truncated checkpoint header" % path)
    (magic, version, d_e, d_a, d_model, taps, use_eaam, linear_streams,
     use_hig, attention, use_eval, n_tensors) = \
        _CKPT_HEADER.unpack_from(data, 0)
    if magic != CHECKPOINT_MAGIC:
        raise FormatError("%s: bad magic %r" % (path, magic))
    if version != CHECKPOINT_VERSION:
        raise FormatError("%s: unsupported version %d" % (path, version))
    config = ModelConfig(d_e=d_e, d_a=d_a, d_model=d_model, sinc_taps=taps,
                         use_eaam=bool(use_eaam),
                         linear_streams=bool(linear_streams),
                         use_hig=bool(use_hig),
                         graph_layer="gat" if attention else "gcn",
                         use_eval=bool(use_eval))
    params = ModelParameters(config)
    state = params.state_dict()
    if n_tensors != len(state):
        raise FormatError("%s: %d tensors, architecture has %d"
                          % (path, n_tensors, len(state)))
    offset = _CKPT_HEADER.size
    loaded = {}
    for name, t in state.items():
        n_bytes = t.numel() * 8
        if offset + n_bytes > len(data):
            raise FormatError("%s: truncated at tensor '%s'" % (path, name))
        values = np.frombuffer(data, dtype="<f8", count=t.numel(),
                               offset=offset)
        loaded[name] = torch.tensor(values.reshape(tuple(t.shape)),
                                    dtype=DTYPE)
        offset += n_bytes
    if offset != len(data):
        raise FormatError("%s: %d trailing bytes" % (path, len(data) - offset))
    params.load_state_dict(loaded)
    return params
