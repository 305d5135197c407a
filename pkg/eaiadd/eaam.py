# -*- coding: utf-8 -*-
""" Emotion-acoustic alignment.

Both streams are projected into a shared d_model space (acoustic stream:
sinc band-pass convolution + residual block + projection; emotion stream:
parallel linear / conv1d + layer norm + projection, with a separate
utterance path), then blended frame by frame with weights driven by how
differently the two streams change over time.

All tensors are 2-D ``(T, channels)`` float64; no batch dimension.
"""

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from .classes import ValidationError
from .tensors import DTYPE, uniform_fan_in_

LAYER_NORM_EPS = 1e-5
MIN_CUTOFF = 1e-4
MIN_BANDWIDTH = 1e-4
NOTIONAL_RATE = 16000.0


def _to_mel(hz):
    return 2595 * np.log10(1 + hz / 700)


def _to_hz(mel):
    return 700 * (10 ** (mel / 2595) - 1)


def mel_cutoffs(n_filters, low_hz=30.0, high_hz=NOTIONAL_RATE / 2):
    """Band edges evenly spaced on the mel scale, as fractions of the
    sampling rate (so 0.5 is Nyquist)."""
    edges = _to_hz(np.linspace(_to_mel(low_hz), _to_mel(high_hz),
                               n_filters + 1)) / NOTIONAL_RATE
    return edges[:-1], edges[1:]


def sinc_kernels(f_low, f_high, taps):
    """Hamming-windowed band-pass kernels, one row per filter: difference of
    two ideal low-pass (sinc) kernels at f_high and f_low."""
    n = torch.arange(taps, dtype=DTYPE) - (taps - 1) / 2
    window = torch.hamming_window(taps, periodic=False, dtype=DTYPE)
    high = 2 * f_high[:, None] * torch.sinc(2 * f_high[:, None] * n)
    low = 2 * f_low[:, None] * torch.sinc(2 * f_low[:, None] * n)
    return (high - low) * window


def _channels_first(x):
    return x.t().unsqueeze(0)


def _channels_last(x):
    return x.squeeze(0).t()


class AcousticStream(nn.Module):
    """Sinc band-pass conv -> residual block -> projection."""

    def __init__(self, d_a, d_model, taps=17):
        super().__init__()
        if taps % 2 == 0:
            raise ValidationError("sinc kernel length must be odd, is %d"
                                  % taps)
        self.taps = taps
        n_filters = d_model
        self.f_low = nn.Parameter(torch.zeros(n_filters, dtype=DTYPE))
        self.f_high = nn.Parameter(torch.zeros(n_filters, dtype=DTYPE))
        self.sinc_mix = nn.Parameter(torch.zeros(n_filters, d_a, dtype=DTYPE))
        self.sinc_bias = nn.Parameter(torch.zeros(n_filters, dtype=DTYPE))
        self.res_conv1 = nn.Conv1d(n_filters, n_filters, 3, padding=1,
                                   dtype=DTYPE)
        self.res_norm = nn.LayerNorm(n_filters, eps=LAYER_NORM_EPS,
                                     dtype=DTYPE)
        self.res_conv2 = nn.Conv1d(n_filters, n_filters, 3, padding=1,
                                   dtype=DTYPE)
        self.proj = nn.Linear(n_filters, d_model, dtype=DTYPE)

    def reset_parameters_(self, gen):
        low, high = mel_cutoffs(self.f_low.shape[0])
        with torch.no_grad():
            self.f_low.copy_(torch.from_numpy(low))
            self.f_high.copy_(torch.from_numpy(high))
        uniform_fan_in_(self.sinc_mix, self.sinc_mix.shape[1], gen)
        uniform_fan_in_(self.sinc_bias, self.sinc_mix.shape[1], gen)

    def constrain_(self):
        """Project cutoffs back into 0 < f_low < f_high <= 0.5."""
        with torch.no_grad():
            self.f_low.clamp_(MIN_CUTOFF, 0.5 - MIN_BANDWIDTH)
            self.f_high.copy_(torch.maximum(self.f_high,
                                            self.f_low + MIN_BANDWIDTH))
            self.f_high.clamp_(max=0.5)


class EmotionStream(nn.Module):
    """Frame path: proj(layernorm(linear(x) + conv1d(x)));
    utterance path: layernorm(linear(u))."""

    def __init__(self, d_e, d_model):
        super().__init__()
        self.frame_linear = nn.Linear(d_e, d_model, dtype=DTYPE)
        self.frame_conv = nn.Conv1d(d_e, d_model, 3, dtype=DTYPE)
        self.frame_norm = nn.LayerNorm(d_model, eps=LAYER_NORM_EPS,
                                       dtype=DTYPE)
        self.frame_proj = nn.Linear(d_model, d_model, dtype=DTYPE)
        self.utt_linear = nn.Linear(d_e, d_model, dtype=DTYPE)
        self.utt_norm = nn.LayerNorm(d_model, eps=LAYER_NORM_EPS, dtype=DTYPE)


class LinearStreams(nn.Module):
    """Plain projections replacing both dedicated streams."""

    def __init__(self, d_e, d_a, d_model):
        super().__init__()
        self.acu_proj = nn.Linear(d_a, d_model, dtype=DTYPE)
        self.emo_proj = nn.Linear(d_e, d_model, dtype=DTYPE)
        self.utt_proj = nn.Linear(d_e, d_model, dtype=DTYPE)


class EaamParams(nn.Module):
    """Learnable weights of the alignment module.

    ``linear_streams`` swaps ARS/ERS for plain projections; ``align=False``
    keeps the projections but skips the cross-stream blending.
    """

    def __init__(self, d_e, d_a, d_model, taps=17, linear_streams=False,
                 align=True):
        super().__init__()
        self.d_e, self.d_a, self.d_model = d_e, d_a, d_model
        self.align = align
        if linear_streams:
            self.streams = LinearStreams(d_e, d_a, d_model)
            self.ars = self.ers = None
        else:
            self.streams = None
            self.ars = AcousticStream(d_a, d_model, taps)
            self.ers = EmotionStream(d_e, d_model)

    def constrain_(self):
        if self.ars is not None:
            self.ars.constrain_()


@dataclass
class AlignedFeatures:
    f_emo_p: torch.Tensor
    f_acu_p: torch.Tensor
    u_p: torch.Tensor
    gamma_align: torch.Tensor
    gamma_mis: torch.Tensor
    gamma_align_utt: torch.Tensor
    gamma_mis_utt: torch.Tensor
    d_fra: torch.Tensor
    d_utt: torch.Tensor


def _check_dims(x, dim, name):
    if x.dim() != 2 or x.shape[1] != dim:
        raise ValidationError("%s should be T x %d, is %s"
                              % (name, dim, tuple(x.shape)))
    if x.shape[0] < 2:
        raise ValidationError("%s: T < 2" % name)


def ars_forward(acu_frames, ars):
    """(T, d_a) -> (T, d_model)"""
    _check_dims(acu_frames, ars.sinc_mix.shape[1], "acu_frames")
    kernels = sinc_kernels(ars.f_low, ars.f_high, ars.taps)
    # filter i applied to every input channel, channels mixed by sinc_mix[i]
    weight = ars.sinc_mix[:, :, None] * kernels[:, None, :]
    x = F.conv1d(_channels_first(acu_frames), weight, ars.sinc_bias,
                 padding=ars.taps // 2)
    r = ars.res_conv1(x)
    r = _channels_first(F.elu(ars.res_norm(_channels_last(r))))
    r = ars.res_conv2(r)
    return ars.proj(_channels_last(x + r))


def ers_forward(emo_frames, emo_utt, ers):
    """(T, d_e), (d_e,) -> (T, d_model), (d_model,)"""
    _check_dims(emo_frames, ers.frame_linear.in_features, "emo_frames")
    if emo_utt.shape != (ers.utt_linear.in_features,):
        raise ValidationError("emo_utt should have %d entries, has %s"
                              % (ers.utt_linear.in_features,
                                 tuple(emo_utt.shape)))
    # replicate padding keeps a time-constant input time-constant
    padded = F.pad(_channels_first(emo_frames), (1, 1), mode="replicate")
    summed = ers.frame_linear(emo_frames) + \
        _channels_last(ers.frame_conv(padded))
    frames = ers.frame_proj(ers.frame_norm(summed))
    utt = ers.utt_norm(ers.utt_linear(emo_utt))
    return frames, utt


def frame_discrepancy(f_emo, f_acu):
    """Per-frame mean |delta f_emo - delta f_acu|; frame 0 is 0."""
    if f_emo.shape != f_acu.shape:
        raise ValidationError("frame_discrepancy: shapes %s and %s differ"
                              % (tuple(f_emo.shape), tuple(f_acu.shape)))
    change = torch.diff(f_emo, dim=0) - torch.diff(f_acu, dim=0)
    d_fra = change.abs().mean(dim=1)
    return torch.cat((d_fra.new_zeros(1), d_fra))


def utterance_discrepancy(f_emo, u_emo_p):
    u = f_emo.mean(dim=0)
    return u, (u - u_emo_p).abs().mean()


def dual_head_weights(d):
    """softmax([-d, +d]) as (gamma_align, gamma_mis); gamma_mis is formed
    as 1 - gamma_align so the pair sums to one."""
    gamma_align = torch.sigmoid(-2 * d)
    return gamma_align, 1 - gamma_align


def align_update(f_emo, f_acu, u, u_emo_p, d_fra, d_utt):
    if f_emo.shape != f_acu.shape or d_fra.shape != f_emo.shape[:1]:
        raise ValidationError("align_update: inconsistent shapes")
    if u.shape != u_emo_p.shape:
        raise ValidationError("align_update: utterance vectors differ in shape")
    gamma_align, gamma_mis = dual_head_weights(d_fra)
    gamma_align_utt, gamma_mis_utt = dual_head_weights(d_utt)
    ga, gm = gamma_align[:, None], gamma_mis[:, None]
    return AlignedFeatures(
        f_emo_p=ga * f_emo + gm * f_acu,
        f_acu_p=ga * f_acu + gm * f_emo,
        u_p=gamma_align_utt * u + gamma_mis_utt * u_emo_p,
        gamma_align=gamma_align, gamma_mis=gamma_mis,
        gamma_align_utt=gamma_align_utt, gamma_mis_utt=gamma_mis_utt,
        d_fra=d_fra, d_utt=d_utt)


def project_streams(emo_frames, emo_utt, acu_frames, params):
    if params.streams is not None:
        _check_dims(emo_frames, params.d_e, "emo_frames")
        _check_dims(acu_frames, params.d_a, "acu_frames")
        s = params.streams
        return s.emo_proj(emo_frames), s.utt_proj(emo_utt), \
            s.acu_proj(acu_frames)
    f_emo, u_emo_p = ers_forward(emo_frames, emo_utt, params.ers)
    f_acu = ars_forward(acu_frames, params.ars)
    if f_emo.shape[0] != f_acu.shape[0]:
        raise ValidationError("emotion and acoustic frame counts differ")
    return f_emo, u_emo_p, f_acu


def eaam_forward(emo_frames, emo_utt, acu_frames, params):
    f_emo, u_emo_p, f_acu = project_streams(emo_frames, emo_utt, acu_frames,
                                            params)
    d_fra = frame_discrepancy(f_emo, f_acu)
    u, d_utt = utterance_discrepancy(f_emo, u_emo_p)
    aligned = align_update(f_emo, f_acu, u, u_emo_p, d_fra, d_utt)
    if not params.align:
        aligned.f_emo_p, aligned.f_acu_p, aligned.u_p = f_emo, f_acu, u_emo_p
    return aligned
