"""
Display utilities for command output.
"""

import math

import numpy as np

from src.flow_analysis import source_loss


def get_loss_quality(p):
    """
    Describe a loss probability with an emoji indicator.

    Args:
        p: loss probability

    Returns:
        str: quality description
    """
    if p <= 1e-9:
        return "🟢 Negligible"
    elif p <= 1e-5:
        return "🟢 Very Low"
    elif p <= 1e-3:
        return "🟡 Low"
    elif p <= 1e-2:
        return "🟠 Noticeable"
    elif p <= 1e-1:
        return "🔴 High"
    else:
        return "🔴 Severe"


def _fmt(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "n/a"
    return f"{value:.6g}"


def display_topology(topology, path=None):
    """Print a short summary of a topology."""
    depths = topology.hop_depths()
    links = topology.links()
    where = f" → {path}" if path else ""
    print(f"🕸️  Network{where}")
    print(f"    └─ Nodes: {topology.node_count} ({topology.sensor_count} sensors + sink)")
    print(f"    └─ Links: {len(links)}")
    print(f"    └─ Max hop depth: {int(depths.max())}")
    print(f"    └─ Total report rate: {_fmt(topology.total_rate)} Hz")
    print(f"    └─ Channel loss q: {_fmt(topology.channel_loss)}")


def display_violations(violations):
    print("❌ Invalid topology:")
    for violation in violations:
        print(f"  • {violation}")


def display_flow(topology, flow, allocation, verbose=False):
    """
    Print the analysis of one allocation.

    Args:
        topology: NetworkTopology
        flow: FlowSolution
        allocation: HarvestingAllocation that produced the flow
        verbose: list every sensor, not only the worst ones
    """
    print(f"\n📊 Scheme: {allocation.scheme} | P_L = {_fmt(flow.network_loss)} "
          f"{get_loss_quality(flow.network_loss)}")
    print(f"    └─ Sink rate θ_V: {_fmt(flow.sink_rate)} Hz of {_fmt(topology.total_rate)} Hz generated")
    per_source = source_loss(topology, flow.node_loss)
    sensors = np.argsort(-flow.node_loss[:topology.sink], kind='stable')
    if not verbose:
        sensors = sensors[:5]
        print("Worst sensors:")
    else:
        print("Sensors:")
    for v in sensors.tolist():
        print(f"  • Sensor {v + 1}: θ = {_fmt(flow.theta[v])} Hz, p = {_fmt(flow.node_loss[v])} "
              f"{get_loss_quality(flow.node_loss[v])}")
        print(f"    └─ μ = {_fmt(allocation.mu[v])} Hz, N = {_fmt(allocation.cap[v])}, "
              f"source loss = {_fmt(per_source[v])}")


def display_allocation_summary(allocation):
    print(f"⚙️  Allocation '{allocation.scheme}': mean μ = {_fmt(allocation.mean_mu)}, "
          f"mean N = {_fmt(allocation.mean_cap)}, μ range [{_fmt(allocation.mu.min())}, {_fmt(allocation.mu.max())}]")


def display_outcome(outcome, analytic_loss):
    """Print a simulation outcome next to the analytic loss."""
    verdict = "✅ agrees" if outcome.agrees_with(analytic_loss) else "⚠️  disagrees"
    print(f"\n🎲 Simulated {outcome.generated} reports: delivered {outcome.delivered}, "
          f"energy losses {sum(outcome.lost_energy)}, channel losses {outcome.lost_channel}")
    print(f"    └─ Empirical P_L: {_fmt(outcome.empirical_loss)} ± {_fmt(outcome.ci_halfwidth)}")
    print(f"    └─ Analytic P_L: {_fmt(analytic_loss)} ({verdict})")


def display_sweep_progress(index, rows):
    cells = ", ".join(f"{row.scheme}={_fmt(row.analytic_PL)}" if row.status == 'ok'
                      else f"{row.scheme}={row.status}" for row in rows[:3])
    more = f" (+{len(rows) - 3} rows)" if len(rows) > 3 else ""
    print(f"  • Network {index}: {cells}{more}")


def display_gap_summary(summary):
    print("\n📈 Scheme comparison")
    print(f"    └─ Instances in window: {summary.instances}")
    print(f"    └─ Median log10 gap uniform vs optimal: {_fmt(summary.uniform_gap)}")
    print(f"    └─ Median log10 gap fair vs optimal: {_fmt(summary.fair_gap)}")
    print(f"    └─ Fair no worse than uniform: {_fmt(summary.fair_not_worse)}")


def display_validation_progress(row):
    if row.status != 'ok':
        print(f"  • Network {row.network_id} (V={row.node_count}): {row.status}")
        return
    mark = "✅" if row.agrees else "⚠️ "
    print(f"  • Network {row.network_id} (V={row.node_count}): analytic {_fmt(row.analytic_PL)}, "
          f"simulated {_fmt(row.sim_PL)} ± {_fmt(row.sim_ci)} {mark}")
