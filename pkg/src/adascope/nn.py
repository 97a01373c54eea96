"""Dense neural-network substrate with explicit reverse-mode gradients.

Everything runs in float64 numpy. There is no general autodiff: each
architecture's backward pass is written out by hand and verified against the
central-difference checker in :func:`grad_check`. Parameters live in plain
``dict[str, ndarray]`` pytrees so the optimizer, checkpointing, and the
gradient checker can treat all models uniformly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError, NumericError
from .rng import RngStream

LN_EPS = 1e-8
KL_CLAMP = 1e-12


# ---------------------------------------------------------------------------
# primitives

def softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    """Numerically stable softmax."""
    shifted = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def layernorm_forward(z: np.ndarray, gain: np.ndarray, bias: np.ndarray):
    """Per-row normalization followed by an affine map.

    Returns (out, cache); cache holds the pre-affine normalized tensor so the
    mean-0 / variance-1 property can be asserted directly.
    """
    mu = z.mean(axis=1, keepdims=True)
    var = z.var(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LN_EPS)
    normed = (z - mu) * inv_std
    return normed * gain + bias, (normed, inv_std, gain)


def layernorm_backward(cache, d_out: np.ndarray):
    normed, inv_std, gain = cache
    d_gain = (d_out * normed).sum(axis=0)
    d_bias = d_out.sum(axis=0)
    d_normed = d_out * gain
    d = normed.shape[1]
    dz = (
        inv_std
        / d
        * (
            d * d_normed
            - d_normed.sum(axis=1, keepdims=True)
            - normed * (d_normed * normed).sum(axis=1, keepdims=True)
        )
    )
    return dz, d_gain, d_bias


def dropout_mask(rng: RngStream, shape, rate: float) -> np.ndarray:
    """Inverted-dropout scale mask: 0 with probability rate, else 1/(1-rate)."""
    keep = rng.uniform(shape) >= rate
    return keep / (1.0 - rate)


def init_linear(rng: RngStream, fan_in: int, fan_out: int) -> np.ndarray:
    """Weights uniform in (-1/sqrt(fan_in), +1/sqrt(fan_in)); biases start at 0."""
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform((fan_in, fan_out)) * 2.0 * bound - bound


# ---------------------------------------------------------------------------
# residual MLP

@dataclass(frozen=True)
class MlpConfig:
    """Shapes and regularization of a ReLU MLP.

    ``layer_sizes`` chains input width through hidden widths to the output
    width, e.g. [F, 64, 64, C] for the default 3 transformation layers.
    Residual connections apply on equal-width hidden layers.
    """

    layer_sizes: tuple
    normalization: str = "none"  # none | layer
    dropout: float = 0.0
    feature_dropout: float = 0.0
    residual: bool = True

    def __post_init__(self):
        if self.normalization == "batch":
            raise ConfigError(
                "batch normalization is not supported (it breaks single-sample "
                "determinism); use 'layer' or 'none'"
            )
        if self.normalization not in ("none", "layer"):
            raise ConfigError(f"unknown normalization {self.normalization!r}")
        if len(self.layer_sizes) < 2:
            raise ConfigError("an MLP needs at least input and output widths")

    @property
    def num_layers(self) -> int:
        return len(self.layer_sizes) - 1


def mlp_config(in_dim: int, hidden_dim: int, out_dim: int, num_layers: int = 3,
               **kwargs) -> MlpConfig:
    """Standard K-transformation-layer config: K-1 hidden layers of one width."""
    if num_layers < 1:
        raise ConfigError("num_layers must be >= 1")
    sizes = (in_dim, *([hidden_dim] * (num_layers - 1)), out_dim)
    return MlpConfig(layer_sizes=sizes, **kwargs)


def init_mlp(config: MlpConfig, rng: RngStream, prefix: str = "") -> dict:
    params = {}
    sizes = config.layer_sizes
    for i in range(config.num_layers):
        params[f"{prefix}w{i}"] = init_linear(rng, sizes[i], sizes[i + 1])
        params[f"{prefix}b{i}"] = np.zeros(sizes[i + 1])
        if config.normalization == "layer" and i < config.num_layers - 1:
            params[f"{prefix}ln{i}_g"] = np.ones(sizes[i + 1])
            params[f"{prefix}ln{i}_b"] = np.zeros(sizes[i + 1])
    return params


def mlp_forward(
    config: MlpConfig,
    params: dict,
    x: np.ndarray,
    train_mode: bool = False,
    rng: RngStream | None = None,
    prefix: str = "",
):
    """Forward pass; returns (logits, cache). Inference is deterministic.

    ``cache`` is None unless train_mode (it is only valid for a matching
    backward pass).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != config.layer_sizes[0]:
        raise ContractError(
            f"input shape {x.shape} does not match expected width "
            f"{config.layer_sizes[0]}"
        )
    if train_mode and (config.dropout > 0 or config.feature_dropout > 0) and rng is None:
        raise ContractError("train_mode with dropout requires an rng stream")

    layers = []
    h = x
    feat_mask = None
    if train_mode and config.feature_dropout > 0:
        feat_mask = dropout_mask(rng, h.shape, config.feature_dropout)
        h = h * feat_mask
    for i in range(config.num_layers - 1):
        w, b = params[f"{prefix}w{i}"], params[f"{prefix}b{i}"]
        z = h @ w + b
        ln_cache = None
        if config.normalization == "layer":
            z, ln_cache = layernorm_forward(
                z, params[f"{prefix}ln{i}_g"], params[f"{prefix}ln{i}_b"]
            )
        a = relu(z)
        drop = None
        if train_mode and config.dropout > 0:
            drop = dropout_mask(rng, a.shape, config.dropout)
            a = a * drop
        res = config.residual and a.shape[1] == h.shape[1]
        out = a + h if res else a
        if not np.all(np.isfinite(out)):
            raise NumericError(f"non-finite activations in layer {i}")
        layers.append({"h_in": h, "z": z, "ln": ln_cache, "drop": drop, "res": res})
        h = out
    w, b = params[f"{prefix}w{config.num_layers - 1}"], params[f"{prefix}b{config.num_layers - 1}"]
    logits = h @ w + b
    if not np.all(np.isfinite(logits)):
        raise NumericError(f"non-finite activations in layer {config.num_layers - 1}")
    cache = {"layers": layers, "h_last": h, "feat_mask": feat_mask, "x": x} if train_mode else None
    return logits, cache


def mlp_backward(config: MlpConfig, params: dict, cache, grad_out: np.ndarray,
                 prefix: str = ""):
    """Exact gradients for all parameters and the input.

    Returns (grads, grad_x). Requires the cache of a matching train-mode
    forward pass.
    """
    if cache is None:
        raise ContractError("mlp_backward needs the cache of a train-mode forward")
    grads = {}
    last = config.num_layers - 1
    grads[f"{prefix}w{last}"] = cache["h_last"].T @ grad_out
    grads[f"{prefix}b{last}"] = grad_out.sum(axis=0)
    dh = grad_out @ params[f"{prefix}w{last}"].T
    for i in range(config.num_layers - 2, -1, -1):
        layer = cache["layers"][i]
        d_out = dh
        d_res = d_out if layer["res"] else 0.0
        da = d_out
        if layer["drop"] is not None:
            da = da * layer["drop"]
        dz = da * (layer["z"] > 0)
        if layer["ln"] is not None:
            dz, d_g, d_b = layernorm_backward(layer["ln"], dz)
            grads[f"{prefix}ln{i}_g"] = d_g
            grads[f"{prefix}ln{i}_b"] = d_b
        grads[f"{prefix}w{i}"] = layer["h_in"].T @ dz
        grads[f"{prefix}b{i}"] = dz.sum(axis=0)
        dh = dz @ params[f"{prefix}w{i}"].T
        if layer["res"]:
            dh = dh + d_res
    if cache["feat_mask"] is not None:
        dh = dh * cache["feat_mask"]
    return grads, dh


# ---------------------------------------------------------------------------
# losses

def cross_entropy(logits: np.ndarray, labels: np.ndarray, mask: np.ndarray):
    """Mean softmax cross-entropy over the masked rows.

    Returns (loss, grad); the gradient is zero outside the mask.
    """
    mask = np.asarray(mask, dtype=np.int64).ravel()
    if mask.size == 0:
        raise ContractError("cross_entropy needs a non-empty mask")
    sub = logits[mask]
    labs = np.asarray(labels, dtype=np.int64)[mask]
    shifted = sub - sub.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_p = shifted - log_z
    loss = -log_p[np.arange(mask.size), labs].mean()
    grad_sub = np.exp(log_p)
    grad_sub[np.arange(mask.size), labs] -= 1.0
    grad = np.zeros_like(logits)
    grad[mask] = grad_sub / mask.size
    return float(loss), grad


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) with the 0*log(0) = 0 convention.

    q entries at or below 1e-12 are clamped there (with a warning) to keep the
    value finite.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if np.any(q <= KL_CLAMP):
        warnings.warn("kl_divergence clamped near-zero q entries", RuntimeWarning)
        q = np.maximum(q, KL_CLAMP)
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / q[nz])))


def sample_gumbel(rng: RngStream, shape) -> np.ndarray:
    """Standard Gumbel noise -log(-log u); u = 0 or 1 draws are resampled."""
    u = rng.uniform(shape)
    bad = (u <= 0.0) | (u >= 1.0)
    while np.any(bad):
        u = np.where(bad, rng.uniform(shape), u)
        bad = (u <= 0.0) | (u >= 1.0)
    return -np.log(-np.log(u))


def gumbel_softmax(
    logits: np.ndarray,
    tau: float,
    rng: RngStream | None = None,
    noise: np.ndarray | None = None,
) -> np.ndarray:
    """Reparameterized soft sample: softmax((logits + gumbel noise) / tau).

    ``noise`` overrides the draw (test hook; zeros give the plain tempered
    softmax). The sample stays in the open simplex and is differentiable with
    respect to the logits.
    """
    if tau <= 0:
        raise ContractError("tau must be positive")
    logits = np.asarray(logits, dtype=np.float64)
    if noise is None:
        if rng is None:
            raise ContractError("gumbel_softmax needs an rng stream or explicit noise")
        noise = sample_gumbel(rng, logits.shape)
    return softmax((logits + noise) / tau, axis=-1)


# ---------------------------------------------------------------------------
# optimizer

class Adam:
    """Bias-corrected Adam over a dict-of-arrays parameter pytree."""

    def __init__(self, lr: float = 0.01, betas=(0.9, 0.999), eps: float = 1e-8):
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.t = 0
        self.m: dict = {}
        self.v: dict = {}

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        for key, p in params.items():
            g = grads.get(key)
            if g is None:
                continue
            if g.shape != p.shape:
                raise ContractError(f"gradient shape mismatch for {key}")
            m = self.m.setdefault(key, np.zeros_like(p))
            v = self.v.setdefault(key, np.zeros_like(p))
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1**self.t)
            v_hat = v / (1.0 - self.beta2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


# ---------------------------------------------------------------------------
# gradient checking

@dataclass
class GradCheckReport:
    max_rel_error: float
    worst_param: str
    passed: bool
    tolerance: float


def grad_check(fn, params: dict, tolerance: float = 1e-4, h: float = 1e-5) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    ``fn(params) -> (loss, grads)`` must be deterministic (dropout off, noise
    frozen). Error per entry is |a - n| / max(|a|, |n|, 1): relative on
    significant entries, absolute below magnitude 1.
    """
    _, analytic = fn(params)
    worst = 0.0
    worst_key = ""
    for key, p in params.items():
        a = analytic.get(key)
        if a is None:
            continue
        num = np.zeros_like(p)
        flat_p = p.ravel()
        flat_n = num.ravel()
        for j in range(flat_p.size):
            orig = flat_p[j]
            flat_p[j] = orig + h
            up, _ = fn(params)
            flat_p[j] = orig - h
            down, _ = fn(params)
            flat_p[j] = orig
            flat_n[j] = (up - down) / (2.0 * h)
        denom = np.maximum(np.maximum(np.abs(a), np.abs(num)), 1.0)
        err = float((np.abs(a - num) / denom).max()) if p.size else 0.0
        if err > worst:
            worst, worst_key = err, key
    return GradCheckReport(
        max_rel_error=worst,
        worst_param=worst_key,
        passed=worst < tolerance,
        tolerance=tolerance,
    )
