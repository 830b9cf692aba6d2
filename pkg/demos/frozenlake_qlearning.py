"""Train a variational-circuit Q-learner on the 4x4 FrozenLake grid.

A short run that prints the episode metrics and the greedy evaluation.
Run with:  python3 demos/frozenlake_qlearning.py
"""

import numpy as np

import vqlab.qrl as qrl
from vqlab.qrl import QrlConfig


def main():
    config = QrlConfig(env="frozenlake", episodes=60, seed=1)
    print(f"training {config.episodes} episodes on {config.env} "
          f"(U={config.num_qubits}, L={config.depth}, lr={config.lr})")
    agent, metrics = qrl.run_training(config)

    print("\nepisode  steps  return  mean_loss  epsilon")
    for m in metrics[::10]:
        print(f"{m['episode']:>7}  {m['steps']:>5}  {m['return']:>6.1f}  "
              f"{m['mean_loss']:>9.4f}  {m['epsilon']:>7.3f}")

    result = qrl.evaluate(agent, "frozenlake", 100, np.random.default_rng(2))
    baseline = qrl.random_policy_baseline("frozenlake", 100,
                                          np.random.default_rng(2))
    print("\ngreedy evaluation:", result)
    print("random baseline:  ", baseline)

    print("\ngreedy action per grid cell (0=L 1=D 2=R 3=U):")
    for row in range(4):
        actions = [int(np.argmax(qrl.q_values(agent, 4 * row + col)))
                   for col in range(4)]
        print("  ", actions)


if __name__ == "__main__":
    main()
