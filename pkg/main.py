#!/usr/bin/env python3
"""
Harvesting Network Toolkit - Event Loss and Resource Allocation
==============================================================

Computes the probability that event reports of an energy-harvesting wireless
sensor network never reach the sink, allocates harvest rates and storage
capacities under a total budget, and checks the analysis against a
discrete-event simulation.

Features:
- Random disk deployments with shortest-path routing to a central sink
- Exact flow-balance analysis with M|M|1|N energy queues
- Uniform, almost-fair and annealed (optimal) resource allocation
- Monte Carlo simulation with confidence intervals
- Parameter sweeps and validation batches to CSV (and SQLite)

Usage:
    python3 main.py generate --nodes 20 --seed 7 -o net.json
    python3 main.py analyze net.json --scheme fair
    python3 main.py sweep --config experiment.toml

Configuration:
    Edit config/settings.py for defaults and parameter profiles, or pass an
    experiment file with --config (TOML or JSON).
"""

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

# Add the project root to Python path for imports
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config import settings
from config.experiment import ExperimentConfig, load_experiment
from config.profiles import profile_parameters
from models.allocation import ResourceBudget
from models.errors import HarvestNetError, InvalidInputError, TopologyValidationError
from models.simulation import SimConfig
from models.topology import GenerationConfig
from src.flow_analysis import solve_flow
from src.netgen import generate_network, uniform_rates
from src.simulator import simulate
from src.sweep import allocate, run_sweep, summarize_gaps
from src.validation import run_validation
from utils import display
from utils.results_csv import ResultsWriter, SWEEP_COLUMNS, VALIDATION_COLUMNS
from utils.results_db import ResultsDB
from utils.serialization import (load_allocation, load_topology, read_bytes, save_allocation,
                                 save_topology, simulation_report, write_bytes)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


def logspace_arg(text):
    """Parse 'START,STOP,COUNT' into COUNT log-spaced values."""
    try:
        start, stop, count = text.split(',')
        return np.logspace(np.log10(float(start)), np.log10(float(stop)), int(count)).tolist()
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START,STOP,COUNT, got {text!r}") from None


def parse_arguments(argv=None):
    """Parse command-line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Master random seed (default: 0)')
    common.add_argument('-o', '--output', help='Output file')
    common.add_argument('--profile', choices=sorted(settings.PROFILES),
                        help=f'Typical parameter profile (default: {settings.DEFAULT_PROFILE})')
    common.add_argument('--config', help='Experiment configuration file (.toml or .json)')
    common.add_argument('--db', help='Also record results in this SQLite database')
    common.add_argument('--verbose', action='store_true', help='Log debug diagnostics to stderr')

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument('--mu', type=float, help='Average harvest rate per sensor (packets/s)')
    budget.add_argument('--cap', type=float, help='Average storage capacity per sensor (packets)')
    budget.add_argument('--iterations', type=int, help='Annealing iterations for the optimal scheme')
    budget.add_argument('--restarts', type=int, help='Independent annealing restarts')

    scheme = argparse.ArgumentParser(add_help=False)
    scheme.add_argument('topology', help='Topology JSON file')
    choice = scheme.add_mutually_exclusive_group()
    choice.add_argument('--allocation', help='Allocation JSON file')
    choice.add_argument('--scheme', choices=settings.SCHEMES, help='Allocation scheme to compute')

    parser = argparse.ArgumentParser(
        description="Harvesting Network Toolkit - event loss analysis and resource allocation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exit codes:
  0 : success
  1 : runtime failure
  2 : invalid input (bad file, arguments or configuration)

Examples:
  python3 main.py generate --nodes 20 --seed 7 -o net.json
  python3 main.py analyze net.json --scheme fair
  python3 main.py allocate net.json --scheme optimal --seed 1 -o alloc.json
  python3 main.py simulate net.json --allocation alloc.json --events 1000000
  python3 main.py sweep --mu-logspace 0.01,10,13 --cap 1000 --networks 20
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', parents=[common], help='Deploy a random network')
    generate.add_argument('--nodes', type=int, help='Number of nodes V, sink included')
    generate.add_argument('--disk-radius', type=float, help='Deployment disk radius (m)')
    generate.add_argument('--connectivity-radius', type=float, help='Link radius (m)')
    generate.add_argument('--channel-loss', type=float, help='Per-transmission loss probability q')
    generate.add_argument('--load', type=float, help='Network-wide report rate (Hz)')
    generate.add_argument('--max-retries', type=int, default=settings.MAX_RETRIES,
                          help='Deployments to try before giving up')

    analyze = commands.add_parser('analyze', parents=[common, budget, scheme], help='Compute θ, p and P_L')
    analyze.add_argument('--all', action='store_true', help='List every sensor')
    analyze.add_argument('--json', action='store_true', help='Print the JSON report instead of the summary')

    allocate_cmd = commands.add_parser('allocate', parents=[common, budget], help='Allocate harvesting resources')
    allocate_cmd.add_argument('topology', help='Topology JSON file')
    allocate_cmd.add_argument('--scheme', choices=settings.SCHEMES, required=True)

    simulate_cmd = commands.add_parser('simulate', parents=[common, budget, scheme], help='Monte Carlo simulation')
    simulate_cmd.add_argument('--events', type=int, help='Counted reports (default: 1,000,000)')
    simulate_cmd.add_argument('--warmup', type=int, help='Uncounted warmup reports (default: 10%% of events)')

    sweep = commands.add_parser('sweep', parents=[common], help='Compare schemes over networks and budgets')
    sweep.add_argument('--topology', help='Use this topology instead of random deployments')
    sweep.add_argument('--nodes', type=int, help='Nodes per random network')
    sweep.add_argument('--networks', type=int, help='Number of random networks')
    sweep.add_argument('--mu', type=float, nargs='+', help='Average harvest rate grid')
    sweep.add_argument('--cap', type=float, nargs='+', help='Average capacity grid')
    sweep.add_argument('--mu-logspace', type=logspace_arg, help='Harvest rate grid as START,STOP,COUNT')
    sweep.add_argument('--cap-logspace', type=logspace_arg, help='Capacity grid as START,STOP,COUNT')
    sweep.add_argument('--budget-mode', choices=('grid', 'random'))
    sweep.add_argument('--samples', type=int, help='Random budget points per network')
    sweep.add_argument('--schemes', nargs='+', choices=settings.SCHEMES)
    sweep.add_argument('--channel-loss', type=float)
    sweep.add_argument('--simulate', action='store_true', default=None, help='Also simulate every row')
    sweep.add_argument('--events', type=int, help='Counted reports per simulation')
    sweep.add_argument('--iterations', type=int, help='Annealing iterations for the optimal scheme')
    sweep.add_argument('--workers', type=int, help='Worker processes')

    validate = commands.add_parser('validate', parents=[common], help='Analytic vs simulated loss on jittered networks')
    validate.add_argument('--networks', type=int, help='Number of random networks')
    validate.add_argument('--min-nodes', type=int, help='Smallest V')
    validate.add_argument('--max-nodes', type=int, help='Largest V')
    validate.add_argument('--jitter', type=float, help='Relative parameter spread (default: 0.5)')
    validate.add_argument('--channel-loss', type=float)
    validate.add_argument('--events', type=int, help='Counted reports per network')
    validate.add_argument('--workers', type=int, help='Worker processes')

    return parser.parse_args(argv)


def experiment_from_args(args):
    """ExperimentConfig from --config, with command-line flags applied on top."""
    config = load_experiment(args.config) if args.config else ExperimentConfig()

    def get(name):
        return getattr(args, name, None)

    mu_grid = get('mu_logspace') or (get('mu') if args.command == 'sweep' else None)
    cap_grid = get('cap_logspace') or (get('cap') if args.command == 'sweep' else None)
    node_range = None
    if get('min_nodes') is not None or get('max_nodes') is not None:
        low, high = config.node_range
        node_range = (get('min_nodes') or low, get('max_nodes') or high)
    config = config.with_overrides(
        seed=get('seed'), profile=get('profile'), node_count=get('nodes'),
        disk_radius=get('disk_radius'), connectivity_radius=get('connectivity_radius'),
        channel_loss=get('channel_loss'), load=get('load'), networks=get('networks'),
        mu_grid=mu_grid, cap_grid=cap_grid, budget_mode=get('budget_mode'),
        budget_samples=get('samples'), schemes=get('schemes'), simulate=get('simulate'),
        sim_events=get('events'), workers=get('workers'), topology_file=get('topology') if args.command == 'sweep' else None,
        node_range=node_range, jitter=get('jitter'),
    )
    optimizer = config.optimizer
    changes = {'seed': config.seed, 'iterations': get('iterations'), 'restarts': get('restarts')}
    optimizer = replace(optimizer, **{k: v for k, v in changes.items() if v is not None})
    return replace(config, optimizer=optimizer)


def budget_from_args(args, config):
    params = profile_parameters(config.profile)
    mu = args.mu if args.mu is not None else params.mu
    cap = args.cap if args.cap is not None else params.cap
    return ResourceBudget(mu, cap)


def load_network(path):
    return load_topology(read_bytes(path))


def resolve_allocation(args, config, topology):
    """The allocation named on the command line: a file, a scheme, or uniform."""
    if args.allocation:
        return load_allocation(read_bytes(args.allocation), topology.sensor_count)
    budget = budget_from_args(args, config)
    return allocate(args.scheme or 'uniform', topology, budget, config.optimizer)


def cmd_generate(args, config):
    params = profile_parameters(config.profile)
    load = params.load if config.load is None else config.load
    channel_loss = params.channel_loss if config.channel_loss is None else config.channel_loss
    generation = GenerationConfig(config.node_count, config.disk_radius, config.connectivity_radius,
                                  rng_seed=config.seed, max_retries=args.max_retries)
    topology = generate_network(generation, uniform_rates(config.node_count, load), channel_loss)
    path = write_bytes(args.output or 'network.json', save_topology(topology))
    display.display_topology(topology, path)
    return EXIT_OK


def cmd_analyze(args, config):
    topology = load_network(args.topology)
    allocation = resolve_allocation(args, config, topology)
    flow = solve_flow(topology, allocation)
    report = {'scheme': allocation.scheme, **flow.to_dict()}
    if args.output:
        write_bytes(args.output, json.dumps(report, indent=2).encode('utf-8'))
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        display.display_flow(topology, flow, allocation, verbose=args.all)
    return EXIT_OK


def cmd_allocate(args, config):
    topology = load_network(args.topology)
    budget = budget_from_args(args, config)
    allocation = allocate(args.scheme, topology, budget, config.optimizer)
    flow = solve_flow(topology, allocation)
    path = write_bytes(args.output or 'allocation.json', save_allocation(allocation))
    display.display_allocation_summary(allocation)
    print(f"💾 Saved to {path}")
    print(f"📊 Predicted P_L = {flow.network_loss:.6g} {display.get_loss_quality(flow.network_loss)}")
    return EXIT_OK


def cmd_simulate(args, config):
    topology = load_network(args.topology)
    allocation = resolve_allocation(args, config, topology)
    sim_config = SimConfig(config.sim_events, args.warmup, rng_seed=config.seed)
    print(f"🎲 Simulating {sim_config.min_generated_events} reports "
          f"(warmup {sim_config.warmup_events}, seed {sim_config.rng_seed})...")
    outcome = simulate(topology, allocation, sim_config)
    flow = solve_flow(topology, allocation)
    path = write_bytes(args.output or 'simulation.json', simulation_report(outcome, flow, allocation))
    display.display_outcome(outcome, flow.network_loss)
    print(f"💾 Saved to {path}")
    return EXIT_OK


class ResultRecorder:
    """Fans rows out to the CSV writer and, when enabled, the results database."""

    def __init__(self, writer, db, kind):
        self.writer = writer
        self.db = db
        self.kind = kind

    def write(self, records):
        self.writer.write(records)
        if self.db is not None:
            for record in records:
                self.db.add_result(self.kind, record)


def cmd_sweep(args, config, db=None):
    output = args.output or str(Path(config.output_dir) / 'sweep.csv')
    networks = 1 if config.topology_file else config.networks
    print(f"🔬 Sweep: {networks} network(s), schemes {', '.join(config.schemes)}, "
          f"{config.workers} worker(s) → {output}")
    with ResultsWriter(output, SWEEP_COLUMNS) as writer:
        rows = run_sweep(config, ResultRecorder(writer, db, 'sweep'), display.display_sweep_progress)
    display.display_gap_summary(summarize_gaps(rows))
    failed = sum(1 for row in rows if row.status != 'ok')
    if failed:
        print(f"⚠️  {failed} row(s) failed; see the status column")
    return EXIT_OK


def cmd_validate(args, config, db=None):
    output = args.output or str(Path(config.output_dir) / 'validation.csv')
    low, high = config.node_range
    print(f"🔬 Validation: {config.networks} network(s), V in [{low}, {high}], "
          f"{config.sim_events} reports each → {output}")
    with ResultsWriter(output, VALIDATION_COLUMNS) as writer:
        rows = run_validation(config, ResultRecorder(writer, db, 'validation'),
                              display.display_validation_progress)
    checked = [row for row in rows if row.status == 'ok']
    agreeing = sum(1 for row in checked if row.agrees)
    print(f"\n✅ {agreeing}/{len(checked)} network(s) agree with the analysis")
    return EXIT_OK


COMMANDS = {
    'generate': cmd_generate,
    'analyze': cmd_analyze,
    'allocate': cmd_allocate,
    'simulate': cmd_simulate,
    'sweep': cmd_sweep,
    'validate': cmd_validate,
}


def main(argv=None):
    """Main entry point; returns the process exit code."""
    args = parse_arguments(argv)
    settings.VERBOSE = args.verbose or settings.VERBOSE
    logging.basicConfig(stream=sys.stderr, format='[%(name)s:%(levelname)s] %(message)s',
                        level=logging.DEBUG if settings.VERBOSE else logging.WARNING)

    db = None
    try:
        config = experiment_from_args(args)
        handler = COMMANDS[args.command]
        if args.command in ('sweep', 'validate'):
            if args.db:
                db = ResultsDB(args.db, command=args.command, arguments=vars(args))
            return handler(args, config, db)
        return handler(args, config)
    except TopologyValidationError as exc:
        display.display_violations(exc.violations)
        return EXIT_INVALID
    except InvalidInputError as exc:
        print(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_INVALID
    except HarvestNetError as exc:
        print(f"❌ {type(exc).__name__}: {exc}")
        return EXIT_FAILURE
    finally:
        if db is not None:
            db.close()


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n👋 Au revoir !")
    except Exception as e:
        print(f"❌ Erreur: {e}")
        sys.exit(1)
