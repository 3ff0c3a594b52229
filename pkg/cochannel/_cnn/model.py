""" cochannel: co-channel speech detection toolkit

    A small 1-D convolutional overlap classifier with analytic gradients.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

from typing import Any, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from .._exceptions import ParameterError, ShapeError
from .._features import FeatureKind
from .._utils.seeds import make_rng
from ..const import _CHANNEL_PLAN, _KERNEL_SIZE, _PROB_CLAMP

Gradients = List[np.ndarray]

_NUM_LAYERS = len(_CHANNEL_PLAN) - 1


class ConvLayer:

    """Valid, stride-1 convolution followed by tanh."""

    __slots__ = ('weights', 'bias')

    def __init__(self, weights: np.ndarray, bias: np.ndarray) -> None:
        weights = np.array(weights, dtype=np.float64)
        bias = np.array(bias, dtype=np.float64)
        if weights.ndim != 3 or bias.shape != (weights.shape[0],):
            raise ShapeError("Conv weights %s do not match bias %s" % (weights.shape, bias.shape))
        self.weights = weights  # (out, in, kernel)
        self.bias = bias

    def __repr__(self) -> str:
        return 'ConvLayer(%d -> %d, kernel=%d)' % (self.in_channels, self.out_channels, self.kernel_size)

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def kernel_size(self) -> int:
        return self.weights.shape[2]

    def convolve(self, x: np.ndarray) -> np.ndarray:
        """Pre-activation for ``x`` of shape (batch, in, L); result is (batch, out, L - kernel + 1)."""
        out_len = x.shape[2] - self.kernel_size + 1
        z = np.zeros((x.shape[0], self.out_channels, out_len))
        for tap in range(self.kernel_size):
            z += np.matmul(self.weights[:, :, tap], x[:, :, tap : tap + out_len])
        return z + self.bias[None, :, None]


class Model:

    """Six conv/tanh layers, a mean pool over positions and a sigmoid unit.

    The canonical plan is 1 -> 128 x 5 -> 32 with kernel 2; smaller widths
    are accepted for experiments as long as there are exactly six layers and
    a single input channel.
    """

    __slots__ = ('layers', 'head_weights', 'head_bias')

    def __init__(self, layers: Sequence[ConvLayer], head_weights: np.ndarray, head_bias: float) -> None:
        layers = list(layers)
        if len(layers) != _NUM_LAYERS:
            raise ParameterError(
                "The classifier has exactly %d conv layers, got %d" % (_NUM_LAYERS, len(layers))
            )
        if layers[0].in_channels != 1:
            raise ParameterError("The first layer takes one input channel, got %d" % layers[0].in_channels)
        for previous, layer in zip(layers, layers[1:]):
            if layer.in_channels != previous.out_channels:
                raise ShapeError("%r cannot follow %r" % (layer, previous))
        head_weights = np.array(head_weights, dtype=np.float64)
        if head_weights.shape != (layers[-1].out_channels,):
            raise ShapeError("Head weights %s do not match %r" % (head_weights.shape, layers[-1]))
        self.layers = layers
        self.head_weights = head_weights
        self.head_bias = np.array(head_bias, dtype=np.float64).reshape(1)

    def __repr__(self) -> str:
        return '<Model:{%s, params=%d}>' % (
            '->'.join(str(c) for c in self.channels),
            self.num_parameters,
        )

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, Model)
            and len(self.parameters()) == len(other.parameters())
            and all(
                a.shape == b.shape and np.array_equal(a, b)
                for a, b in zip(self.parameters(), other.parameters())
            )
        )

    @classmethod
    def initialize(
        cls,
        channels: Sequence[int] = _CHANNEL_PLAN,
        seed: int = 0,
        kernel_size: int = _KERNEL_SIZE,
    ) -> 'Model':
        """Weights uniform in +/- sqrt(1 / (in * kernel)), biases zero."""
        rng = make_rng(seed, 'init')
        layers = []
        for n_in, n_out in zip(channels, channels[1:]):
            bound = np.sqrt(1.0 / (n_in * kernel_size))
            layers.append(ConvLayer(rng.uniform(-bound, bound, (n_out, n_in, kernel_size)), np.zeros(n_out)))
        bound = np.sqrt(1.0 / channels[-1])
        return cls(layers, rng.uniform(-bound, bound, channels[-1]), 0.0)

    @classmethod
    def zeros(cls, channels: Sequence[int] = _CHANNEL_PLAN, kernel_size: int = _KERNEL_SIZE) -> 'Model':
        layers = [
            ConvLayer(np.zeros((n_out, n_in, kernel_size)), np.zeros(n_out))
            for n_in, n_out in zip(channels, channels[1:])
        ]
        return cls(layers, np.zeros(channels[-1]), 0.0)

    @property
    def channels(self) -> Tuple[int, ...]:
        return (self.layers[0].in_channels,) + tuple(layer.out_channels for layer in self.layers)

    @property
    def kernel_size(self) -> int:
        return self.layers[0].kernel_size

    @property
    def min_length(self) -> int:
        """Shortest input the conv stack accepts."""
        return sum(layer.kernel_size - 1 for layer in self.layers) + 1

    def output_length(self, input_length: int) -> int:
        return input_length - self.min_length + 1

    def parameters(self) -> List[np.ndarray]:
        """All parameter arrays in checkpoint order; the arrays are live views."""
        params: List[np.ndarray] = []
        for layer in self.layers:
            params.extend((layer.weights, layer.bias))
        params.extend((self.head_weights, self.head_bias))
        return params

    @property
    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def copy(self) -> 'Model':
        return Model(
            [ConvLayer(layer.weights.copy(), layer.bias.copy()) for layer in self.layers],
            self.head_weights.copy(),
            float(self.head_bias[0]),
        )


class ForwardCache(NamedTuple):
    activations: List[np.ndarray]  # input followed by each layer's tanh output
    pooled: np.ndarray
    probabilities: np.ndarray


def _as_batch(model: Model, batch: np.ndarray) -> np.ndarray:
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim == 2:
        x = x[:, None, :]
    if x.ndim != 3 or x.shape[1] != 1:
        raise ShapeError("Expected a (batch, 1, L) or (batch, L) input, got shape %s" % (x.shape,))
    if x.shape[2] < model.min_length:
        raise ShapeError("Input length %d is shorter than the minimum %d" % (x.shape[2], model.min_length))
    return x


def forward_cached(model: Model, batch: np.ndarray) -> ForwardCache:
    activations = [_as_batch(model, batch)]
    for layer in model.layers:
        activations.append(np.tanh(layer.convolve(activations[-1])))
    pooled = activations[-1].mean(axis=2)
    logits = pooled @ model.head_weights + model.head_bias[0]
    return ForwardCache(activations, pooled, expit(logits))


def forward(model: Model, batch: np.ndarray) -> np.ndarray:
    """Overlap probability for each item of a (batch, 1, L) or (batch, L) input."""
    return forward_cached(model, batch).probabilities


def _clamped(p: np.ndarray) -> np.ndarray:
    return np.clip(p, _PROB_CLAMP, 1.0 - _PROB_CLAMP)


def bce_loss(p: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7]."""
    p = _clamped(np.asarray(p, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if p.shape != y.shape:
        raise ShapeError("%d probabilities for %d labels" % (p.size, y.size))
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def backward(
    model: Model, batch: np.ndarray, labels: np.ndarray, cache: Optional[ForwardCache] = None
) -> Gradients:
    """Gradients of the mean BCE with respect to ``model.parameters()``, in the same order.

    The output gradient is taken in the logit domain, ``(p - y) / batch``, on the
    unclamped probabilities. It matches the clamped loss away from the clamp and
    keeps a confidently wrong item (p near 1, y = 0) trainable.
    """
    cache = cache or forward_cached(model, batch)
    y = np.asarray(labels, dtype=np.float64)
    p = cache.probabilities
    if y.shape != p.shape:
        raise ShapeError("%d labels for a batch of %d" % (y.size, p.size))
    d_logits = (p - y) / len(p)

    head_grads = [cache.pooled.T @ d_logits, np.array([d_logits.sum()])]
    top = cache.activations[-1]
    d_out = np.broadcast_to(
        (d_logits[:, None] * model.head_weights[None, :])[:, :, None] / top.shape[2], top.shape
    )

    layer_grads: Gradients = []
    for index in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[index]
        x = cache.activations[index]
        out = cache.activations[index + 1]
        d_z = d_out * (1.0 - np.square(out))
        out_len = d_z.shape[2]
        d_weights = np.empty_like(layer.weights)
        for tap in range(layer.kernel_size):
            d_weights[:, :, tap] = np.einsum('bol,bil->oi', d_z, x[:, :, tap : tap + out_len])
        layer_grads[:0] = [d_weights, d_z.sum(axis=(0, 2))]
        if index:
            d_in = np.zeros_like(x)
            for tap in range(layer.kernel_size):
                d_in[:, :, tap : tap + out_len] += np.matmul(layer.weights[:, :, tap].T, d_z)
            d_out = d_in
    return layer_grads + head_grads


def sgd_step(model: Model, grads: Gradients, lr: float) -> Model:
    """Plain SGD, theta <- theta - lr * grad, applied in place; returns ``model``."""
    if lr < 0:
        raise ParameterError("Learning rate must be non-negative, got %s" % lr)
    params = model.parameters()
    if len(grads) != len(params):
        raise ShapeError("%d gradients for %d parameter arrays" % (len(grads), len(params)))
    for param, grad in zip(params, grads):
        param -= lr * grad
    return model


def check_input_kind(model: Model, kind: FeatureKind) -> None:
    if kind.dim < model.min_length:
        raise ShapeError("%s features (dim %d) are too short for %r" % (kind.value, kind.dim, model))
