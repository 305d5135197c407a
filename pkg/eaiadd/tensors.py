""" Shared tensor conventions: 64-bit floats and seeded initialisation. """

import math

import numpy as np
import torch
from torch import nn

DTYPE = torch.float64


def to_tensor(array):
    return torch.tensor(np.asarray(array), dtype=DTYPE)


def generator(seed):
    gen = torch.Generator()
    gen.manual_seed(int(seed))
    return gen


def uniform_fan_in_(tensor, fan_in, gen):
    bound = 1.0 / math.sqrt(fan_in)
    with torch.no_grad():
        tensor.uniform_(-bound, bound, generator=gen)


def init_module_(module, gen):
    """uniform(-a, a), a = 1/sqrt(fan-in), for every Linear / Conv1d weight
    and bias below ``module``; LayerNorm back to unit gain, zero bias.
    Raw parameters of custom modules are set by their ``reset_parameters_``.
    """
    for child in module.modules():
        if isinstance(child, (nn.Linear, nn.Conv1d)):
            fan_in = child.weight[0].numel()
            uniform_fan_in_(child.weight, fan_in, gen)
            if child.bias is not None:
                uniform_fan_in_(child.bias, fan_in, gen)
        elif isinstance(child, nn.LayerNorm):
            nn.init.ones_(child.weight)
            nn.init.zeros_(child.bias)
        elif hasattr(child, "reset_parameters_"):
            child.reset_parameters_(gen)
