"""Tanh MLP with exact Laplacians and loss gradients in plain numpy.

Second-order directional jets run forward through the network once per
input axis: alongside each activation a we carry da/dx_j and d2a/dx_j2
for every axis j, giving the exact gradient and Laplacian of the scalar
output. Parameter gradients of the collocation loss come from a
hand-derived reverse sweep over the taped jet computation, so no autodiff
framework is involved anywhere.

All tensors are float64. Jets are stored as (d, n, width) with the axis
index leading, which keeps the per-layer contractions single GEMMs after a
reshape.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .pde_problems import BoundaryBatch, PdeProblem

ACTIVATION = "tanh"


class _Workspace(threading.local):
    """Per-thread arena of reusable float64 buffers.

    Freeing multi-megabyte numpy arrays hands their pages back to the OS, so
    a training loop that reallocates the same jet buffers every step spends
    more time in page faults than in BLAS. The jet sweeps rent buffers here
    instead; everything rented is recycled at the start of the next forward
    pass, by which point no live array references it (public functions only
    ever return copies).
    """

    def __init__(self):
        self.free = {}
        self.used = []

    def take(self, shape) -> np.ndarray:
        stack = self.free.get(shape)
        arr = stack.pop() if stack else np.empty(shape)
        self.used.append(arr)
        return arr

    def recycle(self) -> None:
        for arr in self.used:
            self.free.setdefault(arr.shape, []).append(arr)
        self.used.clear()


_ws = _Workspace()


@dataclass
class MlpParams:
    """Layer weights (out, in) and biases (out,) for widths[0] -> ... -> 1."""

    widths: tuple
    weights: list
    biases: list
    seed: int | None = None

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


def _check_widths(widths):
    widths = tuple(int(w) for w in widths)
    if len(widths) < 2:
        raise ValueError("widths needs at least input and output layers")
    if any(w < 1 for w in widths):
        raise ValueError("every width must be >= 1")
    if widths[-1] != 1:
        raise ValueError("output width must be 1 (scalar field)")
    return widths


def init_params(widths, seed: int = 0) -> MlpParams:
    """Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.

    Layers are drawn in forward order from one Philox stream, row-major, so
    a (widths, seed) pair pins every parameter bit.
    """
    widths = _check_widths(widths)
    rng = np.random.Generator(np.random.Philox(key=seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(widths, weights, biases, seed)


def flatten_params(params: MlpParams) -> np.ndarray:
    chunks = []
    for w, b in zip(params.weights, params.biases):
        chunks.append(w.ravel())
        chunks.append(b)
    return np.concatenate(chunks)


def unflatten_params(widths, theta: np.ndarray, copy: bool = True) -> MlpParams:
    """Rebuild layer arrays from a flat vector.

    With copy=False the layers are views into ``theta``, so in-place updates
    of the flat vector are visible to the network (how the optimizer drives
    training without rebuilding parameters every step).
    """
    widths = _check_widths(widths)
    theta = np.asarray(theta, dtype=np.float64)
    weights, biases = [], []
    pos = 0
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        w = theta[pos : pos + fan_out * fan_in].reshape(fan_out, fan_in)
        pos += fan_out * fan_in
        b = theta[pos : pos + fan_out]
        pos += fan_out
        weights.append(w.copy() if copy else w)
        biases.append(b.copy() if copy else b)
    if pos != theta.shape[0]:
        raise ValueError("theta length does not match widths")
    return MlpParams(widths, weights, biases)


def save_checkpoint(params: MlpParams, path) -> None:
    """Single-file checkpoint: flat parameter vector plus a JSON header."""
    header = json.dumps(
        {"widths": list(params.widths), "activation": ACTIVATION, "seed": params.seed}
    )
    np.savez(path, header=np.array(header), theta=flatten_params(params))


def load_checkpoint(path) -> MlpParams:
    with np.load(path) as z:
        header = json.loads(str(z["header"].item()))
        theta = z["theta"]
    if header.get("activation") != ACTIVATION:
        raise ValueError(f"unsupported activation {header.get('activation')!r}")
    params = unflatten_params(tuple(header["widths"]), theta)
    params.seed = header.get("seed")
    return params


def _check_input(params: MlpParams, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.widths[0]:
        raise ValueError(f"X must have shape (n, {params.widths[0]})")
    return X


# -------------------------------------------------------------- plain forward


def forward(params: MlpParams, X) -> np.ndarray:
    """Network values u(X), shape (n,)."""
    u, _ = _plain_forward(params, _check_input(params, X))
    return u


def _plain_forward(params, X):
    n_layers = len(params.weights)
    a = X
    tape = []
    for layer, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W.T + b
        if layer < n_layers - 1:
            t = np.tanh(z)
            tape.append((a, t))
            a = t
        else:
            tape.append((a, None))
            a = z
    return a[:, 0], tape


def _plain_backward(params, tape, du):
    """Gradients of sum(du * u) w.r.t. weights and biases."""
    n_layers = len(params.weights)
    gW = [None] * n_layers
    gb = [None] * n_layers
    a_bar = du[:, None]
    for layer in reversed(range(n_layers)):
        a_in, t = tape[layer]
        z_bar = a_bar if t is None else a_bar * (1.0 - t * t)
        gW[layer] = z_bar.T @ a_in
        gb[layer] = z_bar.sum(axis=0)
        if layer > 0:
            a_bar = z_bar @ params.weights[layer]
    return gW, gb


# ---------------------------------------------------------------- jet forward
#
# Stacked layout: one ((1 + 2d) n, width) matrix per layer holds the values
# in rows [0, n), the d first-jet blocks in rows [n, (1+d) n), and the d
# second-jet blocks after that. Each linear layer is then a single GEMM over
# the stack, and the reverse sweep folds all three weight-gradient
# contractions into one GEMM per layer.


def _jet_forward(params, X):
    """Values plus first/second directional jets along every input axis.

    Returns (u, U1, U2, tape); U1 and U2 have shape (d, n): per-axis first
    and pure-second derivatives of u. Tape entries are
    (S_in, Z, t, s, tpp): the stacked input, stacked pre-activation, and the
    tanh values/derivatives (None on the output layer).
    """
    n, d = X.shape
    n_layers = len(params.weights)
    head = (1 + d) * n
    total = (1 + 2 * d) * n
    _ws.recycle()
    S = None
    tape = []
    for layer, (W, b) in enumerate(zip(params.weights, params.biases)):
        out = W.shape[0]
        Z = _ws.take((total, out))
        if layer == 0:
            np.matmul(X, W.T, out=Z[:n])
            # input jets are the basis directions: first jets tile W rows,
            # second jets start at zero
            Z[n:head].reshape(d, n, out)[:] = W.T[:, None, :]
            Z[head:] = 0.0
            S_in = X
        else:
            np.matmul(S, W.T, out=Z)
            S_in = S
        Z[:n] += b
        if layer < n_layers - 1:
            t = _ws.take((n, out))
            np.tanh(Z[:n], out=t)
            s = _ws.take((n, out))
            np.multiply(t, t, out=s)
            np.subtract(1.0, s, out=s)
            tpp = _ws.take((n, out))
            np.multiply(t, s, out=tpp)
            tpp *= -2.0
            S = _ws.take((total, out))
            S[:n] = t
            _kernels.jet_act_fwd(Z, S, s, tpp, d, n, layer > 0)
            tape.append((S_in, Z, t, s, tpp))
        else:
            tape.append((S_in, Z, None, None, None))
            S = Z
    u = S[:n, 0].copy()
    U1 = S[n:head, 0].reshape(d, n).copy()
    U2 = S[head:, 0].reshape(d, n).copy()
    return u, U1, U2, tape


def _jet_backward(params, tape, du, dU2):
    """Parameter gradients of sum(du * u) + sum(dU2 * U2).

    No U1 cotangent is needed: the collocation loss touches only values and
    Laplacians.
    """
    n_layers = len(params.weights)
    gW = [None] * n_layers
    gb = [None] * n_layers
    d, n = dU2.shape
    head = (1 + d) * n
    total = (1 + 2 * d) * n
    # cotangent of the last layer's stacked output
    C = _ws.take((total, params.weights[-1].shape[0]))
    C[:n, 0] = du
    C[n:head] = 0.0
    C[head:, 0] = dU2.reshape(d * n)
    for layer in reversed(range(n_layers)):
        S_in, Z, t, s, tpp = tape[layer]
        W = params.weights[layer]
        out = W.shape[0]
        if t is not None:
            # reverse the tanh jet update
            tppp = _ws.take((n, out))
            np.multiply(t, t, out=tppp)
            tppp *= 3.0
            tppp -= 1.0
            tppp *= s
            tppp *= 2.0
            Zb = _ws.take((total, out))
            sum1 = _ws.take((n, out))
            sum2 = _ws.take((n, out))
            sum3 = _ws.take((n, out))
            _kernels.jet_act_bwd(
                C, Z, Zb, s, tpp, tppp, sum1, sum2, sum3, d, n, layer > 0
            )
        else:
            Zb = C
        if layer > 0:
            gW[layer] = Zb.T @ S_in
            gb[layer] = Zb[:n].sum(axis=0)
            C = _ws.take((total, W.shape[1]))
            np.matmul(Zb, W, out=C)
        else:
            gW_l = Zb[:n].T @ S_in
            # identity input jets: direction j contributes its row sums to
            # column j; zero second jets contribute nothing
            gW_l += Zb[n:head].reshape(d, n, out).sum(axis=1).T
            gW[layer] = gW_l
            gb[layer] = Zb[:n].sum(axis=0)
    return gW, gb


_CHUNK = 4096


def value_and_laplacian(params: MlpParams, X) -> tuple[np.ndarray, np.ndarray]:
    """u(X) and its exact Laplacian, chunked so large pools stay in memory."""
    X = _check_input(params, X)
    n = X.shape[0]
    u = np.empty(n)
    lap = np.empty(n)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        ui, _, U2, _ = _jet_forward(params, X[lo:hi])
        u[lo:hi] = ui
        lap[lo:hi] = U2.sum(axis=0)
    return u, lap


def value_grad_laplacian(params: MlpParams, X):
    """u, grad u (n, d) and Laplacian in one jet sweep (no chunking)."""
    X = _check_input(params, X)
    u, U1, U2, _ = _jet_forward(params, X)
    return u, U1.T.copy(), U2.sum(axis=0)


@dataclass(frozen=True)
class LossParts:
    interior: float
    boundary: float


def loss_and_grad(
    params: MlpParams,
    problem: PdeProblem,
    interior: np.ndarray,
    boundary: BoundaryBatch | None = None,
    weight_bc: float = 1.0,
    forcing: np.ndarray | None = None,
):
    """Collocation loss and its exact parameter gradient.

    loss = mean |Delta u + g(u) - f|^2 over interior points
         + weight_bc * mean |u - u*|^2 over the boundary batch.

    ``forcing`` may carry precomputed f values for the interior batch; the
    gradient is returned flat in flatten_params order.
    """
    X_r = _check_input(params, interior)
    n_r = X_r.shape[0]
    if n_r < 1:
        raise ValueError("need at least one interior point")
    if weight_bc < 0.0:
        raise ValueError("weight_bc must be >= 0")
    if forcing is None:
        forcing = problem.forcing(X_r)
    u, _, U2, tape = _jet_forward(params, X_r)
    lap = U2.sum(axis=0)
    r = lap + problem.g(u) - forcing
    loss_r = float(np.mean(r * r))
    scale = 2.0 / n_r
    du = scale * r * problem.g_prime(u)
    dU2 = np.broadcast_to((scale * r)[None, :], U2.shape)
    gW, gb = _jet_backward(params, tape, du, dU2)

    loss_b = 0.0
    if boundary is not None:
        X_b = _check_input(params, boundary.points.points)
        n_b = X_b.shape[0]
        if n_b > 0:
            u_b, tape_b = _plain_forward(params, X_b)
            e_b = u_b - boundary.values
            loss_b = float(np.mean(e_b * e_b))
            du_b = weight_bc * (2.0 / n_b) * e_b
            gWb, gbb = _plain_backward(params, tape_b, du_b)
            for l in range(len(gW)):
                gW[l] += gWb[l]
                gb[l] += gbb[l]

    loss = loss_r + weight_bc * loss_b
    grad = np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(gW, gb)])
    return loss, grad, LossParts(loss_r, loss_b)
