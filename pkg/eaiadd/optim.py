""" Adam with decoupled weight decay. """

import torch

BETAS = (0.9, 0.999)
EPS = 1e-8


def adam_step(param, grad, state, lr, weight_decay, betas=BETAS, eps=EPS):
    """One in-place update of ``param``.

    ``state`` holds ``step`` (int, starts at 0) and the moment buffers
    ``exp_avg`` / ``exp_avg_sq`` (created as zeros on first use).
    Weight decay is decoupled: param -= lr * weight_decay * param.
    """
    if "exp_avg" not in state:
        state["step"] = state.get("step", 0)
        state["exp_avg"] = torch.zeros_like(param)
        state["exp_avg_sq"] = torch.zeros_like(param)
    beta1, beta2 = betas
    exp_avg, exp_avg_sq = state["exp_avg"], state["exp_avg_sq"]
    state["step"] += 1
    step = state["step"]

    exp_avg.mul_(beta1).add_(grad, alpha=1 - beta1)
    exp_avg_sq.mul_(beta2).addcmul_(grad, grad, value=1 - beta2)
    bias_correction1 = 1 - beta1 ** step
    bias_correction2 = 1 - beta2 ** step

    if weight_decay != 0:
        param.mul_(1 - lr * weight_decay)
    denom = (exp_avg_sq.sqrt() / bias_correction2 ** 0.5).add_(eps)
    param.addcdiv_(exp_avg, denom, value=-lr / bias_correction1)


class Adam(torch.optim.Optimizer):
    """
    Args:
        params: Iterable of parameters or dicts defining parameter groups.
        lr: Learning rate.
        betas: Coefficients of the running averages of gradient and square.
        eps: Term added to the denominator.
        weight_decay: Decoupled decay coefficient, scaled by lr.
    """

    def __init__(self, params, lr=1e-5, betas=BETAS, eps=EPS,
                 weight_decay=1e-4):
        if lr <= 0:
            raise ValueError("Invalid learning rate: {}".format(lr))
        if weight_decay < 0:
            raise ValueError("Invalid weight decay: {}".format(weight_decay))
        defaults = dict(lr=lr, betas=betas, eps=eps,
                        weight_decay=weight_decay)
        super().__init__(params, defaults)

    @torch.no_grad()
    def step(self, closure=None):
        loss = None
        if closure is not None:
            with torch.enable_grad():
                loss = closure()
        for group in self.param_groups:
            for p in group["params"]:
                if p.grad is None:
                    continue
                adam_step(p, p.grad, self.state[p], group["lr"],
                          group["weight_decay"], group["betas"],
                          group["eps"])
        return loss


def model_optimizer(params, lr, weight_decay):
    """Optimizer over a ModelParameters; the log-variance s is not decayed."""
    decayed = [p for n, p in params.named_parameters()
               if n != "s" and p.requires_grad]
    groups = [{"params": decayed}]
    if params.s.requires_grad:
        groups.append({"params": [params.s], "weight_decay": 0.0})
    return Adam(groups, lr=lr, weight_decay=weight_decay)
