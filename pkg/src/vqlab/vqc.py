"""Angle-encoded variational quantum circuits with exact gradients.

Pipeline: RY angle encoding of a classical vector (or a basis-state index
for discrete observations), L entangler+rotation layers, per-wire Pauli-Z
readout.  Gradients w.r.t. the rotation angles use the parameter-shift
rule with shift pi/2, which is exact for this gate set; a central finite
difference oracle is kept alongside for verification.

Evaluation is vectorized: a whole batch of circuits (differing in encoding
angles and/or parameters) runs as one (B, 2^U) amplitude array, which is
what makes parameter-shift training loops affordable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import simcore
from .simcore import Statevector, basis_state, zero_state

NONLINEARITIES = ("sigmoid", "clamp01", "none")
ENTANGLERS = ("chain", "ring")
MODEL_SCHEMA = "vqc-v1"
SHIFT = math.pi / 2


class ModelFormatError(ValueError):
    """Malformed or wrong-version model checkpoint."""


@dataclass(frozen=True)
class EncodingSpec:
    """How a classical value becomes a rotation angle: scale * phi(x)."""

    nonlinearity: str = "sigmoid"
    scale: float = math.pi / 2

    def __post_init__(self):
        if self.nonlinearity not in NONLINEARITIES:
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")


@dataclass
class PqcLayer:
    """Per-wire RX/RY/RZ angles for one circuit layer."""

    alphas: np.ndarray
    betas: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=np.float64)
        self.betas = np.asarray(self.betas, dtype=np.float64)
        self.gammas = np.asarray(self.gammas, dtype=np.float64)
        if not (self.alphas.shape == self.betas.shape == self.gammas.shape):
            raise ValueError("alpha/beta/gamma blocks must share one length")


def default_entangler(num_qubits: int) -> str:
    return "chain" if num_qubits <= 2 else "ring"


def entangler_pairs(num_qubits: int, entangler: str) -> list[tuple[int, int]]:
    """CNOT (control, target) pairs applied at the start of each layer."""
    if entangler not in ENTANGLERS:
        raise ValueError(f"unknown entangler {entangler!r}")
    pairs = [(i, i + 1) for i in range(num_qubits - 1)]
    if entangler == "ring" and num_qubits >= 2:
        pairs.append((num_qubits - 1, 0))
    return pairs


class VqcModel:
    """U-qubit, L-layer circuit; parameters live in a flat length-3UL vector.

    Flat layout is layer-major, each layer as (alpha-block, beta-block,
    gamma-block) of U angles each.
    """

    def __init__(self, num_qubits: int, depth: int,
                 params: Optional[np.ndarray] = None,
                 entangler: Optional[str] = None,
                 encoding: Optional[EncodingSpec] = None):
        if num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.num_qubits = num_qubits
        self.depth = depth
        self.entangler = entangler or default_entangler(num_qubits)
        if self.entangler not in ENTANGLERS:
            raise ValueError(f"unknown entangler {self.entangler!r}")
        self.encoding = encoding or EncodingSpec()
        n = 3 * num_qubits * depth
        if params is None:
            params = np.zeros(n)
        params = np.asarray(params, dtype=np.float64).copy()
        if params.shape != (n,):
            raise ValueError(f"expected {n} parameters, got shape {params.shape}")
        self._params = params

    @classmethod
    def random(cls, num_qubits: int, depth: int, seed: int,
               init_scale: float = math.pi / 100,
               entangler: Optional[str] = None,
               encoding: Optional[EncodingSpec] = None) -> "VqcModel":
        """Near-identity initialization: uniform in (-init_scale, init_scale)."""
        rng = np.random.default_rng(seed)
        params = rng.uniform(-init_scale, init_scale, 3 * num_qubits * depth)
        return cls(num_qubits, depth, params, entangler, encoding)

    @property
    def num_params(self) -> int:
        return self._params.size

    @property
    def params(self) -> np.ndarray:
        return self._params.copy()

    @params.setter
    def params(self, values) -> None:
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self._params.shape:
            raise ValueError(
                f"expected {self._params.shape[0]} parameters, "
                f"got shape {values.shape}")
        self._params = values.copy()

    @property
    def layers(self) -> list[PqcLayer]:
        u = self.num_qubits
        out = []
        for layer in range(self.depth):
            base = 3 * u * layer
            out.append(PqcLayer(self._params[base:base + u],
                                self._params[base + u:base + 2 * u],
                                self._params[base + 2 * u:base + 3 * u]))
        return out

    def copy(self) -> "VqcModel":
        return VqcModel(self.num_qubits, self.depth, self._params,
                        self.entangler, self.encoding)

    def __eq__(self, other) -> bool:
        return (isinstance(other, VqcModel)
                and self.num_qubits == other.num_qubits
                and self.depth == other.depth
                and self.entangler == other.entangler
                and self.encoding == other.encoding
                and np.array_equal(self._params, other._params))


@dataclass(frozen=True)
class MeasurementConfig:
    """Analytic expectations, or an M-shot average per wire."""

    mode: str = "analytic"
    shots: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("analytic", "shots"):
            raise ValueError(f"unknown measurement mode {self.mode!r}")
        if self.mode == "shots" and self.shots < 1:
            raise ValueError("shots must be >= 1")


ANALYTIC = MeasurementConfig()


def phi(x: float, spec: EncodingSpec) -> float:
    """Encoding nonlinearity applied to one input coordinate."""
    if not math.isfinite(x):
        raise ValueError(f"input must be finite, got {x}")
    if spec.nonlinearity == "sigmoid":
        # split to avoid overflow in exp for large |x|
        if x >= 0:
            return 1.0 / (1.0 + math.exp(-x))
        e = math.exp(x)
        return e / (1.0 + e)
    if spec.nonlinearity == "clamp01":
        return min(max(x, 0.0), 1.0)
    return x


def encoding_angles(x: Sequence[float], spec: EncodingSpec) -> np.ndarray:
    return np.array([spec.scale * phi(float(v), spec) for v in x])


def encode(x: Sequence[float], spec: EncodingSpec, num_qubits: int) -> Statevector:
    """RY(scale * phi(x_i)) on wire i of |0...0>; a product state."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (num_qubits,):
        raise ValueError(
            f"expected input of length {num_qubits}, got shape {x.shape}")
    amps = zero_state(num_qubits).amps
    for wire, angle in enumerate(encoding_angles(x, spec)):
        amps = simcore.apply_rotation_batch(amps, num_qubits, wire, "RY", angle)
    return Statevector(num_qubits, np.ascontiguousarray(amps))


def basis_encode(state_index: int, num_qubits: int) -> Statevector:
    """Discrete observation -> computational basis state."""
    return basis_state(num_qubits, state_index)


def pqc_apply(state: Statevector, model: VqcModel, layer_index: int) -> Statevector:
    """One layer: entangler CNOTs, then RX/RY/RZ on every wire."""
    if not 0 <= layer_index < model.depth:
        raise ValueError(f"layer_index {layer_index} out of range")
    u = model.num_qubits
    layer = model.layers[layer_index]
    amps = state.amps
    for control, target in entangler_pairs(u, model.entangler):
        amps = simcore.apply_cnot_batch(amps, u, control, target)
    for wire in range(u):
        amps = simcore.apply_rotation_batch(amps, u, wire, "RX", layer.alphas[wire])
        amps = simcore.apply_rotation_batch(amps, u, wire, "RY", layer.betas[wire])
        amps = simcore.apply_rotation_batch(amps, u, wire, "RZ", layer.gammas[wire])
    return Statevector(u, np.ascontiguousarray(amps))


# ---------------------------------------------------------------------------
# Batched engine

def _init_amps(model: VqcModel, enc_angles: Optional[np.ndarray],
               basis_indices: Optional[np.ndarray], batch: int) -> np.ndarray:
    u = model.num_qubits
    amps = np.zeros((batch, 2 ** u), dtype=np.complex128)
    if basis_indices is not None:
        amps[np.arange(batch), basis_indices] = 1.0
    else:
        amps[:, 0] = 1.0
        for wire in range(u):
            amps = simcore.apply_rotation_batch(amps, u, wire, "RY",
                                                enc_angles[:, wire])
    return amps


def run_circuit_batch(model: VqcModel, thetas: np.ndarray,
                      enc_angles: Optional[np.ndarray] = None,
                      basis_indices: Optional[np.ndarray] = None) -> np.ndarray:
    """Z expectations, shape (B, U), for B circuits evaluated at once.

    ``thetas`` is (B, 3UL); exactly one of ``enc_angles`` (B, U) or
    ``basis_indices`` (B,) selects the input state per row.
    """
    u = model.num_qubits
    batch = thetas.shape[0]
    amps = _init_amps(model, enc_angles, basis_indices, batch)
    pairs = entangler_pairs(u, model.entangler)
    for layer in range(model.depth):
        base = 3 * u * layer
        for control, target in pairs:
            amps = simcore.apply_cnot_batch(amps, u, control, target)
        for wire in range(u):
            amps = simcore.apply_rotation_batch(
                amps, u, wire, "RX", thetas[:, base + wire])
            amps = simcore.apply_rotation_batch(
                amps, u, wire, "RY", thetas[:, base + u + wire])
            amps = simcore.apply_rotation_batch(
                amps, u, wire, "RZ", thetas[:, base + 2 * u + wire])
    out = np.empty((batch, u))
    for wire in range(u):
        out[:, wire] = simcore.expect_z_batch(amps, u, wire)
    return out


def _prepare_input(model: VqcModel, x):
    """Split a forward input into (enc_angles, basis_indices), batch of 1."""
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < 2 ** model.num_qubits:
            raise ValueError(
                f"basis index {x} out of range for {model.num_qubits} qubit(s)")
        return None, np.array([int(x)])
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.num_qubits,):
        raise ValueError(
            f"expected input of length {model.num_qubits}, got shape {x.shape}")
    return encoding_angles(x, model.encoding)[None, :], None


def forward(model: VqcModel, x,
            measurement: MeasurementConfig = ANALYTIC) -> np.ndarray:
    """Encode -> L layers -> per-wire Z readout; each output in [-1, 1].

    ``x`` is a length-U real vector, or a basis-state index for discrete
    observations.
    """
    enc, basis = _prepare_input(model, x)
    z = run_circuit_batch(model, model.params[None, :], enc, basis)[0]
    if measurement.mode == "analytic":
        return z
    rng = np.random.default_rng(measurement.seed)
    p_plus = (1.0 + z) / 2.0
    out = np.empty_like(z)
    for wire in range(model.num_qubits):
        outcomes = np.where(rng.random(measurement.shots) < p_plus[wire], 1.0, -1.0)
        out[wire] = outcomes.mean()
    return out


def grad_batch(model: VqcModel, upstreams: np.ndarray,
               enc_angles: Optional[np.ndarray] = None,
               basis_indices: Optional[np.ndarray] = None,
               shift: float = SHIFT) -> np.ndarray:
    """Parameter-shift gradients for n inputs at once; shape (n, 3UL).

    Row i is d(upstreams[i] . z_i)/d(theta) where z_i is the analytic
    forward output for input i.  All 2 * 3UL * n shifted circuits run as a
    single batch.
    """
    n_params = model.num_params
    if n_params == 0:
        return np.zeros((upstreams.shape[0], 0))
    n = upstreams.shape[0]
    theta = model.params
    # rows: input-major, then parameter, then (+, -) shift
    thetas = np.tile(theta, (n * n_params * 2, 1))
    k = np.arange(n_params)
    block = np.zeros((n_params * 2, n_params))
    block[2 * k, k] = shift
    block[2 * k + 1, k] = -shift
    thetas += np.tile(block, (n, 1))
    if basis_indices is not None:
        rep_basis = np.repeat(basis_indices, n_params * 2)
        z = run_circuit_batch(model, thetas, basis_indices=rep_basis)
    else:
        rep_enc = np.repeat(enc_angles, n_params * 2, axis=0)
        z = run_circuit_batch(model, thetas, enc_angles=rep_enc)
    z = z.reshape(n, n_params, 2, model.num_qubits)
    df = (z[:, :, 0, :] - z[:, :, 1, :]) / 2.0
    return np.einsum("npw,nw->np", df, upstreams)


def parameter_shift_grad(model: VqcModel, x, upstream: np.ndarray,
                         measurement: MeasurementConfig = ANALYTIC,
                         shift: float = SHIFT) -> np.ndarray:
    """Exact gradient of upstream . forward(model, x) w.r.t. the flat params.

    ``shift`` exists as a negative-control hook; anything other than pi/2
    breaks exactness on purpose.
    """
    if measurement.mode != "analytic":
        raise ValueError("gradients are only supported in analytic mode")
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (model.num_qubits,):
        raise ValueError(
            f"expected upstream of length {model.num_qubits}, "
            f"got shape {upstream.shape}")
    enc, basis = _prepare_input(model, x)
    return grad_batch(model, upstream[None, :], enc, basis, shift=shift)[0]


def finite_diff_grad(model: VqcModel, x, upstream: np.ndarray,
                     h: float = 1e-4) -> np.ndarray:
    """Central-difference oracle for :func:`parameter_shift_grad`."""
    if not 1e-6 <= h <= 1e-2:
        raise ValueError(f"h must be in [1e-6, 1e-2], got {h}")
    upstream = np.asarray(upstream, dtype=np.float64)
    n_params = model.num_params
    enc, basis = _prepare_input(model, x)
    theta = model.params
    thetas = np.tile(theta, (n_params * 2, 1))
    k = np.arange(n_params)
    thetas[2 * k, k] += h
    thetas[2 * k + 1, k] -= h
    if basis is not None:
        z = run_circuit_batch(model, thetas,
                              basis_indices=np.repeat(basis, n_params * 2))
    else:
        z = run_circuit_batch(model, thetas,
                              enc_angles=np.repeat(enc, n_params * 2, axis=0))
    z = z.reshape(n_params, 2, model.num_qubits)
    df = (z[:, 0, :] - z[:, 1, :]) / (2.0 * h)
    return df @ upstream


# ---------------------------------------------------------------------------
# Checkpoints

def serialize_model(model: VqcModel) -> str:
    return json.dumps({
        "schema": MODEL_SCHEMA,
        "num_qubits": model.num_qubits,
        "depth": model.depth,
        "entangler": model.entangler,
        "encoding": {"nonlinearity": model.encoding.nonlinearity,
                     "scale": model.encoding.scale},
        "params": [float(p) for p in model.params],
    })


def model_from_dict(doc: dict) -> VqcModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    schema = doc.get("schema")
    if schema != MODEL_SCHEMA:
        raise ModelFormatError(
            f"unsupported model schema {schema!r} (expected {MODEL_SCHEMA!r})")
    for key in ("num_qubits", "depth", "entangler", "encoding", "params"):
        if key not in doc:
            raise ModelFormatError(f"model document missing key {key!r}")
    enc = doc["encoding"]
    for key in ("nonlinearity", "scale"):
        if key not in enc:
            raise ModelFormatError(f"model encoding missing key {key!r}")
    try:
        return VqcModel(int(doc["num_qubits"]), int(doc["depth"]),
                        np.asarray(doc["params"], dtype=np.float64),
                        str(doc["entangler"]),
                        EncodingSpec(str(enc["nonlinearity"]),
                                     float(enc["scale"])))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def deserialize_model(text: str) -> VqcModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    return model_from_dict(doc)
