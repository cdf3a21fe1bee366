"""Counter-based, seedable random variates for posterior sampling.

The generator is specified bit-exactly so that encodings are reproducible
across runs, platforms and thread counts:

* ``mix64`` is the SplitMix64 finalizer
  (xor-shift 30, multiply 0xBF58476D1CE4E5B9, xor-shift 27, multiply
  0x94D049BB133111EB, xor-shift 31), operating modulo 2**64.
* A stream key is derived from the master seed and non-negative integer
  coordinates::

      key = mix64(master_seed)
      for c in coordinates:
          key = mix64(key XOR ((c + 1) * GOLDEN mod 2**64))

  with GOLDEN = 0x9E3779B97F4A7C15.
* Word t (t = 0, 1, ...) of a stream is ``mix64(key + (t + 1) * GOLDEN)``;
  the uniform variate takes the top 53 bits: ``((word >> 11) + 0.5) * 2**-53``,
  strictly inside (0, 1).
* Normal variates consume two uniforms (Box-Muller cosine branch).
* Gamma variates with shape >= 1 use the Marsaglia-Tsang squeeze: each round
  consumes one normal (two uniforms) and, when (1 + c*x)**3 > 0, one
  acceptance uniform.  Shapes below 1 are boosted through
  gamma(a) = gamma(a + 1) * u**(1/a), consuming one extra uniform.
* Beta draws are ratios of two gamma draws, Dirichlet draws normalised gamma
  vectors, and Normal-Gamma draws one gamma (the precision tau) followed by
  one normal for the mean.

Every cell (stream) carries its own key and counter, so any partition of
cells across workers reproduces identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conjugate import (
    BetaParams,
    ConjugateParams,
    DirichletParams,
    ImproperDistributionError,
    NormalGammaParams,
)

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_U53 = 2.0**-53


def mix64(z) -> np.ndarray:
    """SplitMix64 finalizer over uint64 arrays."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _MIX_A
        z = (z ^ (z >> _S27)) * _MIX_B
        return z ^ (z >> _S31)


def derive_key(master_seed: int, *coordinates) -> np.ndarray:
    """Derive 64-bit stream keys; coordinates may be ints or integer arrays."""
    key = mix64(np.uint64(int(master_seed) & _MASK64))
    with np.errstate(over="ignore"):
        for coord in coordinates:
            c = np.asarray(coord)
            if np.any(c < 0):
                raise ValueError("stream coordinates must be non-negative")
            c = c.astype(np.uint64)
            key = mix64(key ^ ((c + _ONE) * _GOLDEN))
    return key


@dataclass(frozen=True)
class SeedContext:
    """One fully-specified draw stream: master seed plus coordinates."""

    master_seed: int
    column: int
    row_or_category: int
    draw_index: int

    @property
    def key(self) -> int:
        return int(
            derive_key(self.master_seed, self.column, self.row_or_category, self.draw_index)
        )


def derive_stream(master_seed: int, column: int, row_or_category: int, k: int) -> SeedContext:
    return SeedContext(
        master_seed=int(master_seed),
        column=int(column),
        row_or_category=int(row_or_category),
        draw_index=int(k),
    )


# --- vectorised kernels -----------------------------------------------------
#
# All kernels mutate the per-cell counter array in place, optionally through
# an index of active cells, so rejection loops advance only the streams that
# are still drawing.


def _uniform_at(keys, ctrs, idx=None):
    with np.errstate(over="ignore"):
        if idx is None:
            ctrs += _ONE
            word = mix64(keys + ctrs * _GOLDEN)
        else:
            ctrs[idx] += _ONE
            word = mix64(keys[idx] + ctrs[idx] * _GOLDEN)
    return ((word >> _S11).astype(np.float64) + 0.5) * _U53


def _normal_at(keys, ctrs, idx=None):
    u1 = _uniform_at(keys, ctrs, idx)
    u2 = _uniform_at(keys, ctrs, idx)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def uniform_draws(keys, ctrs):
    return _uniform_at(keys, ctrs)


def normal_draws(keys, ctrs):
    return _normal_at(keys, ctrs)


def gamma_draws(keys, ctrs, shape, rate=1.0):
    """Gamma(shape, rate) draws, one per cell, valid for all shape > 0."""
    keys = np.asarray(keys, dtype=np.uint64)
    shape = np.broadcast_to(np.asarray(shape, dtype=np.float64), keys.shape)
    if np.any(shape <= 0):
        raise ImproperDistributionError("gamma shape must be positive")
    low = shape < 1.0
    boosted = np.where(low, shape + 1.0, shape)
    d = boosted - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    out = np.empty(keys.shape, dtype=np.float64)
    flat_keys = keys.reshape(-1)
    flat_ctrs = ctrs.reshape(-1)
    flat_d = d.reshape(-1)
    flat_c = c.reshape(-1)
    flat_out = out.reshape(-1)

    pending = np.arange(flat_keys.size)
    while pending.size:
        x = _normal_at(flat_keys, flat_ctrs, pending)
        v = (1.0 + flat_c[pending] * x) ** 3
        has_v = v > 0.0
        idx_v = pending[has_v]
        if idx_v.size:
            xv = x[has_v]
            vv = v[has_v]
            u = _uniform_at(flat_keys, flat_ctrs, idx_v)
            xx = xv * xv
            accept = (u < 1.0 - 0.0331 * xx * xx) | (
                np.log(u) < 0.5 * xx + flat_d[idx_v] * (1.0 - vv + np.log(vv))
            )
            done = idx_v[accept]
            flat_out[done] = flat_d[done] * vv[accept]
            rejected = idx_v[~accept]
        else:
            rejected = pending[:0]
        pending = np.sort(np.concatenate([pending[~has_v], rejected]))

    low_idx = np.nonzero(low.reshape(-1))[0]
    if low_idx.size:
        u = _uniform_at(flat_keys, flat_ctrs, low_idx)
        flat_out[low_idx] *= u ** (1.0 / shape.reshape(-1)[low_idx])
    return out / np.asarray(rate, dtype=np.float64)


def beta_draws(keys, ctrs, alpha, beta):
    g1 = gamma_draws(keys, ctrs, alpha)
    g2 = gamma_draws(keys, ctrs, beta)
    return g1 / (g1 + g2)


def dirichlet_draws(keys, ctrs, alphas):
    """alphas has shape keys.shape + (n_classes,); rows are normalised."""
    alphas = np.asarray(alphas, dtype=np.float64)
    n_classes = alphas.shape[-1]
    parts = np.stack(
        [gamma_draws(keys, ctrs, alphas[..., c]) for c in range(n_classes)], axis=-1
    )
    return parts / parts.sum(axis=-1, keepdims=True)


def normal_gamma_draws(keys, ctrs, mu0, nu, alpha, beta):
    """Returns (mu, tau): tau ~ Gamma(alpha, rate=beta), mu ~ N(mu0, 1/(nu tau))."""
    nu = np.broadcast_to(np.asarray(nu, dtype=np.float64), np.shape(keys))
    if np.any(nu <= 0):
        raise ImproperDistributionError("normal-gamma draw needs nu > 0")
    tau = gamma_draws(keys, ctrs, alpha, rate=beta)
    z = _normal_at(keys, ctrs)
    mu = np.asarray(mu0, dtype=np.float64) + z / np.sqrt(nu * tau)
    return mu, tau


# --- scalar draw API ---------------------------------------------------------


@dataclass(frozen=True)
class PosteriorDraw:
    """One realisation of the posterior parameters for a single cell."""

    task: str
    p: float | None = None
    pi: np.ndarray | None = None
    mu: float | None = None
    tau: float | None = None


def draw(params: ConjugateParams, ctx: SeedContext) -> PosteriorDraw:
    """Draw once from a proper conjugate posterior on the context's stream."""
    keys = np.array([ctx.key], dtype=np.uint64)
    ctrs = np.zeros(1, dtype=np.uint64)
    if isinstance(params, BetaParams):
        p = beta_draws(keys, ctrs, params.alpha, params.beta)
        return PosteriorDraw(task="binary", p=float(p[0]))
    if isinstance(params, DirichletParams):
        alphas = np.array([params.alphas], dtype=np.float64)
        pi = dirichlet_draws(keys, ctrs, alphas)
        return PosteriorDraw(task="multiclass", pi=pi[0])
    if isinstance(params, NormalGammaParams):
        if not params.is_proper:
            raise ImproperDistributionError(
                f"cannot sample from improper Normal-Gamma{params}"
            )
        mu, tau = normal_gamma_draws(
            keys, ctrs, params.mu0, params.nu, params.alpha, params.beta
        )
        return PosteriorDraw(task="regression", mu=float(mu[0]), tau=float(tau[0]))
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


class RandomStream:
    """Sequential convenience stream (bootstraps, shuffles, feature subsets)."""

    def __init__(self, key: int):
        self._keys = np.array([int(key) & _MASK64], dtype=np.uint64)
        self._ctrs = np.zeros(1, dtype=np.uint64)

    def uniforms(self, n: int) -> np.ndarray:
        start = int(self._ctrs[0])
        with np.errstate(over="ignore"):
            ts = (np.arange(start + 1, start + n + 1, dtype=np.uint64)) * _GOLDEN
            words = mix64(self._keys[0] + ts)
        self._ctrs[0] = np.uint64(start + n)
        return ((words >> _S11).astype(np.float64) + 0.5) * _U53

    def integers(self, n: int, bound: int) -> np.ndarray:
        """n integers uniform on [0, bound)."""
        return np.minimum((self.uniforms(n) * bound).astype(np.int64), bound - 1)

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.uniforms(n), kind="stable")

    def subset(self, n: int, k: int) -> np.ndarray:
        """k distinct indices from range(n), partial Fisher-Yates order."""
        pool = np.arange(n)
        u = self.uniforms(k)
        for i in range(k):
            j = i + int(u[i] * (n - i))
            j = min(j, n - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
