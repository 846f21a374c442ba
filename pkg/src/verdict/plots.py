"""Matplotlib figures for the simulate/compare report paths."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def plot_episode(trace, path) -> None:
    """Energy over time with recharge markers, plus cumulative reward."""
    times = [s.time for s in trace]
    energy = [s.energy for s in trace]
    cumulative = []
    total = 0.0
    for s in trace:
        total += s.reward
        cumulative.append(total)
    charge_times = [s.time for s in trace if s.action == "Charge"]
    charge_energy = [s.energy for s in trace if s.action == "Charge"]

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.step(times, energy, where="post", color="tab:blue", label="energy")
    ax1.scatter(charge_times, charge_energy, color="tab:orange", zorder=3, label="charge action")
    ax1.set_ylabel("energy")
    ax1.legend(loc="best")
    ax2.step(times, cumulative, where="post", color="tab:green")
    ax2.set_xlabel("time step")
    ax2.set_ylabel("cumulative reward")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_policy_comparison(summaries, path) -> None:
    """Grouped per-episode means of the headline metrics for each policy."""
    policies = list(summaries)
    metrics = [
        ("served low", lambda s: s.served_low / s.episodes),
        ("served high", lambda s: s.served_high / s.episodes),
        ("urgent missed", lambda s: s.urgent_missed / s.episodes),
        ("depleted", lambda s: s.depleted_episodes / s.episodes),
        ("mean reward", lambda s: s.mean_reward),
    ]
    width = 0.8 / len(policies)
    fig, ax = plt.subplots(figsize=(9, 5))
    for i, policy in enumerate(policies):
        values = [fn(summaries[policy]) for _, fn in metrics]
        positions = [j + i * width for j in range(len(metrics))]
        ax.bar(positions, values, width=width, label=policy)
    ax.set_xticks([j + width * (len(policies) - 1) / 2 for j in range(len(metrics))])
    ax.set_xticklabels([name for name, _ in metrics])
    ax.set_ylabel("per-episode mean")
    ax.set_title("Policy comparison")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
