# -*- coding: utf-8 -*-
""" Training loop and scoring helpers. """

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .classes import ValidationError
from .eaimm import EvalConfig
from .metrics import ScoreSet
from .model import (LossBreakdown, check_bundle, init_parameters, loss_terms,
                    score)
from .optim import model_optimizer


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 60
    learning_rate: float = 1e-5
    weight_decay: float = 1e-4
    batch_size: int = 8
    seed: int = 0
    eval_cfg: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1, is %d" % self.epochs)
        if not self.learning_rate > 0:
            raise ValidationError("learning rate must be > 0")
        if self.weight_decay < 0:
            raise ValidationError("weight decay must be >= 0")
        if self.batch_size < 1:
            raise ValidationError("batch size must be >= 1")


@dataclass
class TrainResult:
    params: object
    history: List[LossBreakdown]
    n_backward: int
    warnings: List[str]


def mean_breakdown(breakdowns):
    return LossBreakdown(*(float(np.mean([getattr(b, f) for b in breakdowns]))
                           for f in ("ce", "eval", "s", "total")))


def utterance_rng(seed, epoch, position):
    return np.random.default_rng([seed, epoch, position])


def train(bundles, model_config, cfg,
          on_epoch: Optional[Callable[[int, LossBreakdown], None]] = None,
          params=None):
    """Per-utterance gradient accumulation over windows of ``batch_size``,
    one Adam step per window, utterance order reshuffled every epoch.

    Fully determined by (cfg.seed, bundles); ``history`` holds the mean
    loss breakdown of every epoch."""
    if not bundles:
        raise ValidationError("cannot train on an empty dataset")
    for bundle in bundles:
        check_bundle(bundle, model_config)
    warnings = []
    labels = {b.label for b in bundles}
    if len(labels) < 2:
        warnings.append("training set holds only '%s' utterances"
                        % labels.pop())
    if params is None:
        params = init_parameters(model_config, cfg.seed)
    optimizer = model_optimizer(params, cfg.learning_rate, cfg.weight_decay)
    order_rng = np.random.default_rng(cfg.seed)
    history = []
    n_backward = 0
    for epoch in range(cfg.epochs):
        order = order_rng.permutation(len(bundles))
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            window = order[start:start + cfg.batch_size]
            optimizer.zero_grad()
            for position, index in enumerate(window, start):
                total, ce, ev = loss_terms(
                    bundles[index], params, cfg.eval_cfg,
                    utterance_rng(cfg.seed, epoch, position))
                (total / len(window)).backward()
                n_backward += 1
                epoch_losses.append(LossBreakdown(
                    ce=ce.item(), eval=ev.item(), s=params.s.item(),
                    total=total.item()))
            optimizer.step()
            params.constrain_()
        history.append(mean_breakdown(epoch_losses))
        if on_epoch is not None:
            on_epoch(epoch, history[-1])
    return TrainResult(params, history, n_backward, warnings)


def score_bundles(bundles, params):
    """Single pass over ``bundles``, which may be any iterable."""
    ids, scores, labels = [], [], []
    for bundle in bundles:
        ids.append(bundle.id)
        scores.append(score(bundle, params))
        labels.append(bundle.label)
    return ScoreSet(ids, scores, labels)
