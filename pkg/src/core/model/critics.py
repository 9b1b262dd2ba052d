"""Critics that score real and synthetic samples in the adversarial game.

The score critic reuses the KGC scoring function on three synthetic
triples per positive. The MLP critic is the ablation that replaces it
with a small network over concatenated per-modality embeddings.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from src.core.autodiff import ops
from src.core.model.redaf import score, score_input_grad

if TYPE_CHECKING:
    from src.core.autodiff import Tensor
    from src.core.model.comat import SyntheticSet
    from src.core.model.params import ParamView


class ScoreCritic:
    """Critic given by the rotation score of (h*, r, t), (h, r, t*), (h*, r, t*)."""

    name = "score"

    def real_scores(self, view: ParamView, sset: SyntheticSet) -> Tensor:
        return score(sset.head, sset.theta, sset.tail)

    def synthetic_scores(self, view: ParamView, sset: SyntheticSet) -> list[Tensor]:
        return [
            score(sset.head_syn, sset.theta, sset.tail),
            score(sset.head, sset.theta, sset.tail_syn),
            score(sset.head_syn, sset.theta, sset.tail_syn),
        ]

    def penalty_norms(self, view: ParamView, sset: SyntheticSet) -> list[Tensor]:
        """Per-positive gradient norms at every synthetic side of every triple."""
        grad_h, _ = score_input_grad(sset.head_syn, sset.theta, sset.tail)
        _, grad_t = score_input_grad(sset.head, sset.theta, sset.tail_syn)
        both_h, both_t = score_input_grad(sset.head_syn, sset.theta, sset.tail_syn)
        return [ops.norm(g, axis=-1) for g in (grad_h, grad_t, both_h, both_t)]


class MlpCritic:
    """``D(x) = w2 . tanh(x W1 + b1) + b2`` over concatenated embeddings."""

    name = "mlp"

    def forward(self, view: ParamView, x: Tensor) -> Tensor:
        hidden = ops.tanh(ops.matmul(x, view["critic.w1"]) + view["critic.b1"])
        out = ops.matmul(hidden, ops.reshape(view["critic.w2"], (-1, 1)))
        return ops.reshape(out, (-1,)) + view["critic.b2"]

    def input_grad(self, view: ParamView, x: Tensor) -> Tensor:
        """Closed-form ``dD/dx`` per row, kept on the tape."""
        hidden = ops.tanh(ops.matmul(x, view["critic.w1"]) + view["critic.b1"])
        slope = (1.0 - ops.square(hidden)) * view["critic.w2"]
        return ops.matmul(slope, ops.transpose(view["critic.w1"]))

    def real_scores(self, view: ParamView, sset: SyntheticSet) -> Tensor:
        total = self.forward(view, sset.head_concat) + self.forward(view, sset.tail_concat)
        return ops.scale(total, 0.5)

    def synthetic_scores(self, view: ParamView, sset: SyntheticSet) -> list[Tensor]:
        return [self.forward(view, sset.head_syn_concat), self.forward(view, sset.tail_syn_concat)]

    def penalty_norms(self, view: ParamView, sset: SyntheticSet) -> list[Tensor]:
        return [
            ops.norm(self.input_grad(view, x), axis=-1)
            for x in (sset.head_syn_concat, sset.tail_syn_concat)
        ]


def make_critic(mlp: bool) -> ScoreCritic | MlpCritic:
    return MlpCritic() if mlp else ScoreCritic()
