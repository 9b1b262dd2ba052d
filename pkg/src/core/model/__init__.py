"""The KGC model: parameters, fusion and scoring, adversarial training."""

from src.core.model.checkpoint import load_checkpoint, save_checkpoint
from src.core.model.comat import (
    SyntheticEntity,
    SyntheticSet,
    adv_loss,
    concat_real,
    discriminator_step,
    generate,
    generator_step,
    gradient_penalty,
)
from src.core.model.critics import MlpCritic, ScoreCritic, make_critic
from src.core.model.params import (
    DISCRIMINATOR,
    GENERATOR,
    ModelLayout,
    ModelParams,
    ParamView,
)
from src.core.model.redaf import (
    JointEmbedding,
    encode_modality,
    fuse,
    kgc_loss,
    modality_weights,
    rotate,
    score,
    score_input_grad,
    score_triples,
    self_adv_weights,
)

__all__ = [
    "DISCRIMINATOR",
    "GENERATOR",
    "JointEmbedding",
    "MlpCritic",
    "ModelLayout",
    "ModelParams",
    "ParamView",
    "ScoreCritic",
    "SyntheticEntity",
    "SyntheticSet",
    "adv_loss",
    "concat_real",
    "discriminator_step",
    "encode_modality",
    "fuse",
    "generate",
    "generator_step",
    "gradient_penalty",
    "kgc_loss",
    "load_checkpoint",
    "make_critic",
    "modality_weights",
    "rotate",
    "save_checkpoint",
    "score",
    "score_input_grad",
    "score_triples",
    "self_adv_weights",
]
