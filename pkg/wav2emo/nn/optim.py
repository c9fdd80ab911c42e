import logging
from typing import Dict

import numpy as np

from wav2emo.nn.network import AdamState, Checkpoint
from wav2emo.nn.specs import TrainConfig

logger = logging.getLogger(__name__)


def adam_step(
    ckpt: Checkpoint, grads: Dict[str, np.ndarray], cfg: TrainConfig
) -> Checkpoint:
    """One bias-corrected Adam update; returns a new checkpoint."""
    adam = cfg.optimizer
    state = ckpt.optimizer_state
    step = state.step + 1
    correction1 = 1.0 - adam.beta1**step
    correction2 = 1.0 - adam.beta2**step

    parameters = {}
    first_moment = {}
    second_moment = {}
    for name, param in ckpt.parameters.items():
        g = grads[name].astype(param.dtype, copy=False)
        m = state.first_moment.get(name, np.zeros_like(param))
        v = state.second_moment.get(name, np.zeros_like(param))
        m = adam.beta1 * m + (1.0 - adam.beta1) * g
        v = adam.beta2 * v + (1.0 - adam.beta2) * (g * g)
        m_hat = m / correction1
        v_hat = v / correction2
        update = cfg.learning_rate * m_hat / (np.sqrt(v_hat) + adam.eps)
        parameters[name] = (param - update).astype(param.dtype, copy=False)
        first_moment[name] = m.astype(param.dtype, copy=False)
        second_moment[name] = v.astype(param.dtype, copy=False)

    return ckpt.model_copy(
        update={
            "parameters": parameters,
            "optimizer_state": AdamState(
                step=step, first_moment=first_moment, second_moment=second_moment
            ),
        }
    )
