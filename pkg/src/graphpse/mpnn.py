"""Forward-only GIN, GatedGCN and GPSE computations, plus the GIN-to-GatedGCN construction.

Conventions: node features are rows of an ``(n, d)`` array. GIN and GatedGCN
weight matrices are ``(out, in)`` and act as ``W @ h`` per node, i.e.
``H @ W.T`` on the feature matrix. GPSE's input projection and heads use the
row-vector form ``x @ W``, i.e. ``(in, out)`` matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlphaOutOfRange, VerdictFailed, WidthMismatch
from .graph import Graph, add_virtual_node


def relu(x):
    return np.maximum(x, 0.0)


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


def linear(h: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``h @ w.T`` with every row reduced the same way, whatever its position.

    BLAS kernels may round a row differently depending on where it sits in
    the matrix; this keeps node-wise maps bit-exactly permutation-equivariant.
    """
    return (h[:, None, :] * w[None, :, :]).sum(axis=-1)


def _multiset_sum(rows: np.ndarray) -> np.ndarray:
    # sorting each column first makes the float sum depend only on the multiset
    return np.sort(rows, axis=0).sum(axis=0)


def neighbor_sum(g: Graph, h: np.ndarray) -> np.ndarray:
    """``sum_{u in N(v)} h_u`` for every ``v``, independent of neighbor order."""
    out = np.zeros_like(h)
    for v, nb in enumerate(g.neighbors):
        if nb:
            out[v] = _multiset_sum(h[list(nb)])
    return out


def _as_features(h, g: Graph) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.ndim == 1:
        h = h[:, None]
    if h.shape[0] != g.num_nodes:
        raise WidthMismatch(f"{h.shape[0]} feature rows for {g.num_nodes} nodes")
    return h


# --------------------------------------------------------------------- GIN

@dataclass(frozen=True)
class GinLayerWeights:
    epsilon: float
    mlp_w1: np.ndarray  # (hidden, in)
    mlp_w2: np.ndarray  # (out, hidden)

    def __post_init__(self):
        w1 = np.atleast_2d(np.asarray(self.mlp_w1, dtype=float))
        w2 = np.atleast_2d(np.asarray(self.mlp_w2, dtype=float))
        if w2.shape[1] != w1.shape[0]:
            raise WidthMismatch(f"mlp_w2 has {w2.shape[1]} columns, mlp_w1 has {w1.shape[0]} rows")
        object.__setattr__(self, "mlp_w1", w1)
        object.__setattr__(self, "mlp_w2", w2)

    @property
    def in_width(self) -> int:
        return self.mlp_w1.shape[1]

    @property
    def out_width(self) -> int:
        return self.mlp_w2.shape[0]


def gin_layer(h, g: Graph, w: GinLayerWeights) -> np.ndarray:
    """``MLP((1 + eps) h_v + sum_{u in N(v)} h_u)`` with ``MLP(x) = ReLU(W2 ReLU(W1 x))``."""
    h = _as_features(h, g)
    if h.shape[1] != w.in_width:
        raise WidthMismatch(f"features have width {h.shape[1]}, layer expects {w.in_width}")
    p = (1.0 + w.epsilon) * h + neighbor_sum(g, h)
    return relu(linear(relu(linear(p, w.mlp_w1)), w.mlp_w2))


def gin_forward(h0, g: Graph, stack: list[GinLayerWeights]) -> list[np.ndarray]:
    """Hidden states of every layer, input first."""
    hs = [_as_features(h0, g)]
    for w in stack:
        hs.append(gin_layer(hs[-1], g, w))
    return hs


def random_gin_stack(widths: list[int], rng: np.random.Generator, scale: float = 1.0) -> list[GinLayerWeights]:
    """GIN layers with entries uniform in ``[-scale, scale]``.

    ``widths`` lists in/hidden/out sizes alternately: ``[d0, h1, d1, h2, d2, ...]``.
    """
    if len(widths) < 3 or len(widths) % 2 == 0:
        raise ValueError("widths must be [d0, h1, d1, ...] with an odd length >= 3")
    stack = []
    for i in range(0, len(widths) - 2, 2):
        d_in, d_hid, d_out = widths[i], widths[i + 1], widths[i + 2]
        stack.append(
            GinLayerWeights(
                epsilon=float(rng.uniform(-scale, scale)),
                mlp_w1=rng.uniform(-scale, scale, (d_hid, d_in)),
                mlp_w2=rng.uniform(-scale, scale, (d_out, d_hid)),
            )
        )
    return stack


# ---------------------------------------------------------------- GatedGCN

@dataclass(frozen=True)
class GatedGcnLayerWeights:
    U: np.ndarray  # (out, in)
    V: np.ndarray  # (out, in)
    A: np.ndarray  # (out, in)
    B: np.ndarray  # (out, in)

    def __post_init__(self):
        mats = {k: np.atleast_2d(np.asarray(getattr(self, k), dtype=float)) for k in "UVAB"}
        shapes = {m.shape for m in mats.values()}
        if len(shapes) != 1:
            raise WidthMismatch(f"U, V, A, B must share one shape, got {sorted(shapes)}")
        for k, m in mats.items():
            object.__setattr__(self, k, m)

    @property
    def in_width(self) -> int:
        return self.U.shape[1]

    @property
    def out_width(self) -> int:
        return self.U.shape[0]


def gatedgcn_layer(h, g: Graph, w: GatedGcnLayerWeights, residual: bool = False) -> np.ndarray:
    """``ReLU(U h_v + sum_{u in N(v)} sigmoid(A h_v + B h_u) * (V h_u))``.

    The gate's ``A`` term reads the receiving node and the ``B`` term the
    sender. With ``residual=True`` the input is added to the output, which
    needs equal in/out widths.
    """
    h = _as_features(h, g)
    if h.shape[1] != w.in_width:
        raise WidthMismatch(f"features have width {h.shape[1]}, layer expects {w.in_width}")
    self_term = linear(h, w.U)
    recv = linear(h, w.A)
    send = linear(h, w.B)
    msg = linear(h, w.V)
    agg = np.zeros_like(self_term)
    for v, nb in enumerate(g.neighbors):
        if nb:
            nb = list(nb)
            agg[v] = _multiset_sum(sigmoid(recv[v] + send[nb]) * msg[nb])
    out = relu(self_term + agg)
    if residual:
        if out.shape != h.shape:
            raise WidthMismatch("residual connection needs equal in/out widths")
        out = out + h
    return out


# -------------------------------------------------------------------- GPSE

@dataclass(frozen=True)
class GpseHead:
    w1: np.ndarray  # (d, d)
    w2: np.ndarray  # (d, 1)
    level: str = "node"

    def __post_init__(self):
        w1 = np.atleast_2d(np.asarray(self.w1, dtype=float))
        w2 = np.asarray(self.w2, dtype=float).reshape(w1.shape[1], -1)
        if self.level not in ("node", "graph"):
            raise ValueError(f"head level must be 'node' or 'graph', got {self.level!r}")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)


@dataclass(frozen=True)
class GpseWeights:
    w_inp: np.ndarray  # (in, d)
    layers: list[GatedGcnLayerWeights]
    heads: list[GpseHead] = field(default_factory=list)

    def __post_init__(self):
        object.__setattr__(self, "w_inp", np.atleast_2d(np.asarray(self.w_inp, dtype=float)))
        d = self.w_inp.shape[1]
        for i, layer in enumerate(self.layers):
            if layer.in_width != d or layer.out_width != d:
                raise WidthMismatch(f"layer {i} is {layer.out_width}x{layer.in_width}, expected {d}x{d}")
        for i, head in enumerate(self.heads):
            if head.w1.shape[0] != d:
                raise WidthMismatch(f"head {i} expects width {head.w1.shape[0]}, encoder has {d}")

    @property
    def inner_dim(self) -> int:
        return self.w_inp.shape[1]


def random_gpse_weights(
    in_dim: int = 20,
    inner_dim: int = 32,
    num_layers: int = 4,
    num_node_heads: int = 1,
    num_graph_heads: int = 0,
    rng: np.random.Generator | None = None,
) -> GpseWeights:
    """Glorot-uniform weights for a toy-sized encoder and decoder."""
    rng = rng or np.random.default_rng(0)

    def glorot(fan_in, fan_out):
        lim = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-lim, lim, (fan_in, fan_out))

    d = inner_dim
    layers = [GatedGcnLayerWeights(*(glorot(d, d) for _ in range(4))) for _ in range(num_layers)]
    heads = [GpseHead(glorot(d, d), glorot(d, 1), "node") for _ in range(num_node_heads)]
    heads += [GpseHead(glorot(d, d), glorot(d, 1), "graph") for _ in range(num_graph_heads)]
    return GpseWeights(glorot(in_dim, d), layers, heads)


def gpse_encoder_forward(g: Graph, x, w: GpseWeights, residual: bool = False) -> np.ndarray:
    """Encode node features; the virtual node's row is removed from the output.

    If ``g`` has no virtual node one is appended, and ``x`` must already
    include a row for it (index ``g.num_nodes``).
    """
    if g.virtual_node is None:
        g = add_virtual_node(g)
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != g.num_nodes:
        raise WidthMismatch(f"expected {g.num_nodes} feature rows (virtual node included), got {x.shape}")
    if x.shape[1] != w.w_inp.shape[0]:
        raise WidthMismatch(f"features have width {x.shape[1]}, w_inp expects {w.w_inp.shape[0]}")
    h = relu(linear(x, w.w_inp.T))
    for layer in w.layers:
        h = gatedgcn_layer(h, g, layer, residual=residual)
    keep = [v for v in range(g.num_nodes) if v != g.virtual_node]
    return h[keep]


def gpse_decode(h, heads: list[GpseHead]) -> list[np.ndarray]:
    """``ReLU(h W1) W2`` per head; graph-level heads sum-pool the nodes first."""
    h = np.atleast_2d(np.asarray(h, dtype=float))
    out = []
    for i, head in enumerate(heads):
        if h.shape[1] != head.w1.shape[0]:
            raise WidthMismatch(f"head {i} expects width {head.w1.shape[0]}, embeddings have {h.shape[1]}")
        z = h.sum(axis=0, keepdims=True) if head.level == "graph" else h
        out.append((relu(z @ head.w1) @ head.w2)[:, 0])
    return out


# ------------------------------------------------ GIN -> GatedGCN construction

def split_alpha(alpha: float, num_layers: int) -> float:
    """Per-layer alpha whose compounded shrinkage over the stack equals ``alpha``."""
    return -math.expm1(math.log1p(-alpha) / num_layers)


def thm1_layers(w: GinLayerWeights, alpha: float) -> list[GatedGcnLayerWeights]:
    """Three GatedGCN layers reproducing one GIN layer up to a factor ``1 - alpha``.

    Input and output carry a leading constant-1 channel. Widths go
    ``1+d_in -> 1+2*d_in -> 1+d_hid -> 1+d_out``.
    """
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    d_in, d_hid, d_out = w.in_width, w.mlp_w1.shape[0], w.out_width
    eye = np.eye(d_in)
    beta = (1.0 + w.epsilon) * (1.0 - alpha)

    # aggregation: gate is the constant 1 - alpha, read from channel 0
    a1 = np.zeros((1 + 2 * d_in, 1 + d_in))
    a1[:, 0] = logit(1.0 - alpha)
    v1 = np.zeros((1 + 2 * d_in, 1 + d_in))
    v1[1:1 + d_in, 1:] = eye
    v1[1 + d_in:, 1:] = -eye
    u1 = np.zeros((1 + 2 * d_in, 1 + d_in))
    u1[0, 0] = 1.0
    u1[1:1 + d_in, 1:] = beta * eye
    u1[1 + d_in:, 1:] = -beta * eye
    first = GatedGcnLayerWeights(U=u1, V=v1, A=a1, B=np.zeros_like(a1))

    # MLP layers: messages switched off
    u2 = np.zeros((1 + d_hid, 1 + 2 * d_in))
    u2[0, 0] = 1.0
    u2[1:, 1:1 + d_in] = w.mlp_w1
    u2[1:, 1 + d_in:] = -w.mlp_w1
    second = GatedGcnLayerWeights(U=u2, V=np.zeros_like(u2), A=np.zeros_like(u2), B=np.zeros_like(u2))

    u3 = np.zeros((1 + d_out, 1 + d_hid))
    u3[0, 0] = 1.0
    u3[1:, 1:] = w.mlp_w2
    third = GatedGcnLayerWeights(U=u3, V=np.zeros_like(u3), A=np.zeros_like(u3), B=np.zeros_like(u3))
    return [first, second, third]


def thm1_construct(gin_stack: list[GinLayerWeights], alpha: float, split: bool = True) -> list[GatedGcnLayerWeights]:
    """GatedGCN stack approximating ``gin_stack`` with relative error at most ``alpha``.

    Each GIN layer becomes three GatedGCN layers (:func:`thm1_layers`), which
    reproduce the GIN output scaled by ``1 - alpha_l``. The MLPs have no
    biases, so the scalings multiply through the stack. With ``split=True``
    each layer uses ``alpha_l = split_alpha(alpha, L)``, making the overall
    factor exactly ``1 - alpha``. ``split=False`` uses ``alpha`` at every
    layer, so the error after ``L`` layers grows to ``1 - (1 - alpha)^L``.
    """
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha}")
    a = split_alpha(alpha, len(gin_stack)) if split and gin_stack else alpha
    out = []
    for w in gin_stack:
        out.extend(thm1_layers(w, a))
    return out


@dataclass(frozen=True)
class Thm1Result:
    max_error: float
    bound: float
    alpha: float
    layer_errors: tuple[float, ...]
    constant_channel_exact: bool

    @property
    def passed(self) -> bool:
        return self.max_error <= self.bound + 1e-9 and self.constant_channel_exact


def thm1_verify(g: Graph, h0, gin_stack: list[GinLayerWeights], alpha: float, split: bool = True, check: bool = False) -> Thm1Result:
    """Run the GIN stack and its constructed GatedGCN counterpart and compare.

    ``max_error`` is the largest node-wise Euclidean gap between GIN layer
    outputs and the matching GatedGCN outputs with the constant channel
    dropped. ``bound`` is ``alpha`` times the largest GIN hidden-state norm
    over all layers, the input included. With ``check=True`` a violated
    bound raises :class:`VerdictFailed` instead of only clearing ``passed``.
    """
    hs = gin_forward(h0, g, gin_stack)
    gated = thm1_construct(gin_stack, alpha, split=split)
    x = np.hstack([np.ones((g.num_nodes, 1)), hs[0]])
    errors = [0.0]
    const_ok = True
    for l in range(len(gin_stack)):
        for layer in gated[3 * l:3 * l + 3]:
            x = gatedgcn_layer(x, g, layer)
            const_ok &= bool(np.all(x[:, 0] == 1.0))
        gap = np.linalg.norm(hs[l + 1] - x[:, 1:], axis=1)
        errors.append(float(gap.max()) if gap.size else 0.0)
    max_norm = max((float(np.linalg.norm(h, axis=1).max()) if h.size else 0.0) for h in hs)
    res = Thm1Result(max(errors), alpha * max_norm, alpha, tuple(errors), const_ok)
    if check and not res.passed:
        raise VerdictFailed(f"error {res.max_error!r} exceeds bound {res.bound!r} at alpha={alpha}")
    return res
