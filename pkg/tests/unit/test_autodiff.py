"""Tests for the tensor core: primitives, tape, and gradient checks."""

from __future__ import annotations

import numpy as np
import pytest

from src.contracts.errors import NonFiniteError, ShapeError
from src.core.autodiff import Tape, Tensor, backward, grad_check, ops

RNG = np.random.default_rng(1234)
TOL = 1e-6


def _draw(shape) -> np.ndarray:
    return RNG.normal(size=shape)


UNARY = {
    "neg": lambda x: ops.sum(ops.neg(x)),
    "scale": lambda x: ops.sum(ops.scale(x, -2.5)),
    "square": lambda x: ops.sum(ops.square(x)),
    "sqrt": lambda x: ops.sum(ops.sqrt(ops.square(x) + 1.0)),
    "exp": lambda x: ops.sum(ops.exp(x)),
    "log": lambda x: ops.sum(ops.log(ops.square(x) + 0.5)),
    "tanh": lambda x: ops.sum(ops.tanh(x) * ops.tanh(x)),
    "sigmoid": lambda x: ops.sum(ops.sigmoid(x) * x),
    "log_sigmoid": lambda x: ops.sum(ops.log_sigmoid(x)),
    "softmax": lambda x: ops.sum(ops.softmax(x, axis=-1) * np.arange(4.0)),
    "mean": lambda x: ops.mean(ops.square(x), axis=0) @ np.ones((4, 1)) * 1.0,
    "norm": lambda x: ops.norm(x),
    "norm_axis": lambda x: ops.sum(ops.norm(x, axis=-1)),
    "reshape": lambda x: ops.sum(ops.reshape(x, (4, 3)) @ np.arange(3.0).reshape(3, 1)),
    "transpose": lambda x: ops.sum(ops.transpose(x) @ np.ones((3, 2))),
    "take": lambda x: ops.sum(ops.square(ops.take(x, [0, 2, 2, 1]))),
    "split": lambda x: ops.sum(ops.split(x, [1, 3])[1] * 2.0),
    "concat": lambda x: ops.sum(ops.square(ops.concat([x, ops.scale(x, 3.0)]))),
}


class TestPrimitiveGradients:
    @pytest.mark.parametrize("name", sorted(UNARY))
    def test_unary_matches_finite_differences(self, name: str) -> None:
        f = UNARY[name]

        def scalar(x: Tensor) -> Tensor:
            out = f(x)
            return ops.reshape(out, ()) if out.data.size == 1 else ops.sum(out)

        assert grad_check(scalar, _draw((3, 4))) < TOL

    @pytest.mark.parametrize("op", [ops.add, ops.sub, ops.mul, ops.div])
    def test_broadcast_binary_both_operands(self, op) -> None:
        a = _draw((3, 4))
        b = np.abs(_draw((1, 4))) + 0.5
        assert grad_check(lambda x: ops.sum(op(x, b)), a) < TOL
        assert grad_check(lambda y: ops.sum(op(a, y)), b) < TOL

    def test_matmul_rank2_and_rank1(self) -> None:
        w = _draw((4, 2))
        assert grad_check(lambda x: ops.sum(ops.matmul(x, w)), _draw((3, 4))) < TOL
        assert grad_check(lambda x: ops.sum(ops.matmul(x, w)), _draw(4)) < TOL
        a = _draw((3, 4))
        assert grad_check(lambda y: ops.sum(ops.square(ops.matmul(a, y))), w) < TOL

    def test_relu_away_from_kink(self) -> None:
        x = np.array([[-1.0, 0.3], [2.0, -0.2]])
        assert grad_check(lambda t: ops.sum(ops.relu(t) * 3.0), x) < TOL

    def test_clip_inside_and_outside(self) -> None:
        x = np.array([-2.0, -0.5, 0.25, 3.0])
        assert grad_check(lambda t: ops.sum(ops.clip(t, -1.0, 1.0) * t), x) < TOL

    def test_rotate_both_arguments(self) -> None:
        h = _draw((3, 6))
        theta = _draw((3, 3))
        target = _draw((3, 6))
        assert grad_check(lambda x: ops.sum(ops.square(ops.rotate(x, theta) - target)), h) < TOL
        assert grad_check(lambda t: ops.sum(ops.square(ops.rotate(h, t) - target)), theta) < TOL

    def test_rotate_broadcasts_phases(self) -> None:
        h = _draw((5, 4))
        theta = _draw((1, 2))
        assert grad_check(lambda t: ops.sum(ops.rotate(h, t) * h), theta) < TOL


class TestSeededTrials:
    TRIALS = 100

    @pytest.mark.parametrize("name", sorted(UNARY))
    def test_unary_over_uniform_draws(self, name: str) -> None:
        rng = np.random.default_rng(7)
        f = UNARY[name]

        def scalar(x: Tensor) -> Tensor:
            out = f(x)
            return ops.reshape(out, ()) if out.data.size == 1 else ops.sum(out)

        worst = max(grad_check(scalar, rng.uniform(-2.0, 2.0, size=(3, 4))) for _ in range(self.TRIALS))
        assert worst < 1e-4

    @pytest.mark.parametrize("op", [ops.add, ops.sub, ops.mul, ops.div])
    def test_binary_over_uniform_draws(self, op) -> None:
        rng = np.random.default_rng(11)
        for _ in range(self.TRIALS):
            a = rng.uniform(-2.0, 2.0, size=(3, 4))
            b = np.abs(rng.uniform(-2.0, 2.0, size=(1, 4))) + 0.5
            assert grad_check(lambda x, b=b: ops.sum(op(x, b)), a) < 1e-4
            assert grad_check(lambda y, a=a: ops.sum(op(a, y)), b) < 1e-4

    def test_rotate_over_uniform_draws(self) -> None:
        rng = np.random.default_rng(13)
        for _ in range(self.TRIALS):
            h = rng.uniform(-2.0, 2.0, size=(2, 6))
            theta = rng.uniform(-2.0, 2.0, size=(2, 3))
            assert grad_check(lambda x, t=theta, h=h: ops.sum(ops.rotate(x, t) * h), h) < 1e-4
            assert grad_check(lambda t, h=h: ops.sum(ops.rotate(h, t) * h), theta) < 1e-4


class TestPrimitiveValues:
    def test_split_undoes_concat_bitwise(self) -> None:
        parts = [_draw((3, 2)), _draw((3, 5)), _draw((3, 1))]
        joined = ops.concat(parts)
        for piece, original in zip(ops.split(joined, [2, 5, 1]), parts, strict=True):
            assert np.array_equal(piece.data, original)
            assert piece.data.tobytes() == original.tobytes()

    def test_split_single_columns(self) -> None:
        pieces = ops.split(np.zeros((2, 3)), [1, 1, 1])
        assert [p.shape for p in pieces] == [(2, 1)] * 3

    def test_rotate_by_zero_is_identity(self) -> None:
        h = _draw((2, 6))
        assert np.array_equal(ops.rotate(h, np.zeros((2, 3))).data, h)

    def test_rotate_preserves_modulus(self) -> None:
        h = _draw((4, 8))
        out = ops.rotate(h, _draw((4, 4))).data
        modulus = lambda v: v[:, :4] ** 2 + v[:, 4:] ** 2  # noqa: E731
        np.testing.assert_allclose(modulus(out), modulus(h), atol=1e-12)

    def test_rotate_by_pi_negates(self) -> None:
        h = _draw((1, 4))
        np.testing.assert_allclose(ops.rotate(h, np.full((1, 2), np.pi)).data, -h, atol=1e-12)

    def test_log_sigmoid_is_stable(self) -> None:
        out = ops.log_sigmoid(np.array([-800.0, 0.0, 800.0])).data
        np.testing.assert_allclose(out, [-800.0, np.log(0.5), 0.0])

    def test_softmax_rows_sum_to_one(self) -> None:
        out = ops.softmax(np.array([[1000.0, 0.0], [1.0, 1.0]])).data
        np.testing.assert_allclose(out.sum(axis=1), 1.0)
        np.testing.assert_allclose(out[1], [0.5, 0.5])

    def test_norm_gradient_at_zero_is_zero(self) -> None:
        tape = Tape()
        x = tape.watch(np.zeros(3), "x")
        grads = backward(tape, ops.norm(x))
        assert np.array_equal(grads["x"], np.zeros(3))


class TestErrors:
    def test_matmul_shape_error_names_op(self) -> None:
        with pytest.raises(ShapeError, match="matmul"):
            ops.matmul(np.ones((2, 3)), np.ones((2, 3)))

    def test_broadcast_mismatch(self) -> None:
        with pytest.raises(ShapeError, match="add"):
            ops.add(np.ones((2, 3)), np.ones((4,)))

    def test_rotate_odd_width(self) -> None:
        with pytest.raises(ShapeError):
            ops.rotate(np.ones((1, 3)), np.ones((1, 1)))

    def test_log_of_zero_is_non_finite(self) -> None:
        with pytest.raises(NonFiniteError, match="log"):
            ops.log(np.zeros(2))

    def test_division_by_zero_is_non_finite(self) -> None:
        with pytest.raises(NonFiniteError):
            ops.div(np.ones(2), np.zeros(2))

    def test_item_requires_scalar(self) -> None:
        with pytest.raises(ShapeError):
            Tensor(np.ones(3)).item()

    def test_backward_requires_scalar(self) -> None:
        tape = Tape()
        x = tape.watch(np.ones(3), "x")
        with pytest.raises(ShapeError):
            backward(tape, x * 2.0)

    def test_duplicate_leaf_name(self) -> None:
        tape = Tape()
        tape.watch(np.ones(1), "w")
        with pytest.raises(ValueError, match="already watched"):
            tape.watch(np.ones(1), "w")

    def test_mixed_tapes_rejected(self) -> None:
        a = Tape().watch(np.ones(2), "a")
        b = Tape().watch(np.ones(2), "b")
        with pytest.raises(ValueError, match="different tapes"):
            ops.add(a, b)

    def test_grad_check_eps_range(self) -> None:
        with pytest.raises(ValueError, match="eps"):
            grad_check(lambda x: ops.sum(x), np.ones(2), eps=1e-2)


class TestTape:
    def test_unreached_leaf_gets_zero_gradient(self) -> None:
        tape = Tape()
        x = tape.watch(np.ones(2), "x")
        tape.watch(np.ones((2, 2)), "unused")
        grads = backward(tape, ops.sum(x * 3.0))
        assert np.array_equal(grads["unused"], np.zeros((2, 2)))
        assert np.array_equal(grads["x"], np.full(2, 3.0))

    def test_shared_subexpression_accumulates(self) -> None:
        tape = Tape()
        x = tape.watch(np.array([2.0]), "x")
        y = x * x
        grads = backward(tape, ops.sum(y + y))
        assert grads["x"][0] == pytest.approx(8.0)

    def test_constants_are_not_taped(self) -> None:
        out = ops.mul(np.ones(2), np.ones(2))
        assert not out.requires_grad

    def test_stop_gradient_detaches(self) -> None:
        tape = Tape()
        x = tape.watch(np.array([3.0]), "x")
        grads = backward(tape, ops.sum(x * ops.stop_gradient(x)))
        assert grads["x"][0] == pytest.approx(3.0)

    def test_tensor_data_is_read_only(self) -> None:
        t = Tensor(np.ones(2))
        with pytest.raises(ValueError):
            t.data[0] = 5.0

    def test_watch_copies_value(self) -> None:
        source = np.ones(2)
        leaf = Tape().watch(source, "w")
        source[0] = 9.0
        assert leaf.data[0] == 1.0
