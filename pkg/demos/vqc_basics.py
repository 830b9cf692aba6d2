"""Walk through the statevector simulator and the variational circuit model.

Run with:  python3 demos/vqc_basics.py
"""

import numpy as np

from vqlab.simcore import (GateOp, apply_gate, expectation_z, sample_z_mean,
                           zero_state)
from vqlab.vqc import (VqcModel, finite_diff_grad, forward,
                       parameter_shift_grad)


def main():
    rng = np.random.default_rng(7)

    # --- raw gates on a statevector -------------------------------------
    print("== statevector basics ==")
    state = zero_state(2)
    state = apply_gate(state, GateOp("RY", (0,), np.pi / 2))
    state = apply_gate(state, GateOp("CNOT", (0, 1)))
    print("Bell-like state amplitudes:", np.round(state.amps, 4))
    print("<Z_0> =", expectation_z(state, 0), " <Z_1> =",
          expectation_z(state, 1))

    # finite shots converge on the analytic expectation
    for shots in (100, 10_000):
        est = sample_z_mean(state, 0, shots, np.random.default_rng(0))
        print(f"sampled <Z_0> with {shots:>6} shots: {est:+.4f}")

    # --- a full encode -> entangle -> rotate -> measure circuit ---------
    print("\n== variational model ==")
    model = VqcModel.random(num_qubits=3, depth=2, seed=7,
                            init_scale=np.pi)
    x = rng.normal(size=3)
    z = forward(model, x)
    print("input:", np.round(x, 3))
    print("per-wire <Z> output:", np.round(z, 4))

    # --- exact gradients via the parameter-shift rule -------------------
    upstream = np.ones(3)
    ps = parameter_shift_grad(model, x, upstream)
    fd = finite_diff_grad(model, x, upstream, h=1e-4)
    print(f"\nparameter-shift vs finite differences over "
          f"{model.params.size} parameters:")
    print("max abs deviation:", float(np.max(np.abs(ps - fd))))


if __name__ == "__main__":
    main()
