# -*- coding: utf-8 -*-
""" Central finite-difference check of the backprop gradients.

For every parameter element x_i:

    numeric_i = (L(x + h e_i) - L(x - h e_i)) / 2h

and per parameter group

    rel = max_i |analytic_i - numeric_i| / max(max|analytic|, max|numeric|,
                                               GRAD_FLOOR)

The negative sampler is re-seeded for every loss evaluation, so all
evaluations see the same negatives.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
import torch

from .eaimm import EvalConfig
from .feature_store import FeatureBundle
from .model import ModelConfig, backward, init_parameters, loss_terms

STEP = 1e-6
GRAD_FLOOR = 1e-5
TOLERANCE = 1e-4


@dataclass
class GradcheckReport:
    errors: Dict[str, float]
    n_checked: Dict[str, int]
    s_closed_form_error: float

    @property
    def max_error(self):
        return max(self.errors.values())

    def passed(self, tolerance=TOLERANCE):
        return self.max_error < tolerance


def numeric_gradient(loss, param, step=STEP):
    grad = torch.zeros_like(param)
    flat = param.data.view(-1)
    out = grad.view(-1)
    for i in range(flat.numel()):
        orig = flat[i].item()
        flat[i] = orig + step
        plus = loss()
        flat[i] = orig - step
        minus = loss()
        flat[i] = orig
        out[i] = (plus - minus) / (2 * step)
    return grad


def relative_error(analytic, numeric):
    scale = max(analytic.abs().max().item(), numeric.abs().max().item(),
                GRAD_FLOOR)
    return (analytic - numeric).abs().max().item() / scale


def check_gradients(bundle, params, cfg, seed, step=STEP,
                    progress: Optional[Callable] = None):
    """``progress`` optionally wraps the iterable of (group, members) pairs,
    e.g. to drive a progress bar."""
    def rng():
        return np.random.default_rng(seed)

    def loss():
        with torch.no_grad():
            return loss_terms(bundle, params, cfg, rng())[0].item()

    analytic = backward(bundle, params, cfg, rng())
    errors, counts = {}, {}
    groups = list(params.groups().items())
    for group, members in (progress(groups) if progress else groups):
        a_parts, n_parts = [], []
        for name, p in members:
            if not p.requires_grad:
                continue
            a_parts.append(analytic[name].reshape(-1))
            n_parts.append(numeric_gradient(loss, p, step).reshape(-1))
        if a_parts:
            errors[group] = relative_error(torch.cat(a_parts),
                                           torch.cat(n_parts))
            counts[group] = sum(t.numel() for t in a_parts)

    s_error = 0.0
    if params.s.requires_grad:
        with torch.no_grad():
            _, _, ev = loss_terms(bundle, params, cfg, rng())
        closed_form = 1 - torch.exp(-params.s) * ev
        s_error = abs(closed_form.item() - analytic["s"].item())
    return GradcheckReport(errors, counts, s_error)


def random_instance(seed, n_frames=6, d_e=4, d_a=4, d_model=4, **variant):
    """Small random bundle and perturbed parameters for a gradient check."""
    rng = np.random.default_rng(seed)
    bundle = FeatureBundle(
        "gradcheck", rng.normal(size=(n_frames, d_e)),
        rng.normal(size=d_e), rng.normal(size=(n_frames, d_a)),
        "spoof" if rng.random() < 0.5 else "bonafide")
    params = init_parameters(ModelConfig(d_e=d_e, d_a=d_a, d_model=d_model,
                                         **variant), seed)
    gen = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        # move off the init point: unit layer-norm gains and s = 0 would
        # leave those gradients special
        for p in params.parameters():
            if p.requires_grad:
                p.add_(0.1 * torch.randn(p.shape, generator=gen,
                                         dtype=p.dtype))
    params.constrain_()
    return bundle, params


def run_gradcheck(seed, k=1, far_margin=None, step=STEP, progress=None,
                  **variant):
    bundle, params = random_instance(seed, **variant)
    return check_gradients(bundle, params,
                           EvalConfig(k=k, far_margin=far_margin), seed, step,
                           progress)
