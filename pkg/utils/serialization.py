"""
JSON encoding of topologies, allocations and simulation reports.

Indices in files are 1-based with node V being the sink. Floats go through
json's repr-based encoding, which round-trips doubles exactly.
"""

import json
from pathlib import Path

import numpy as np

from models.allocation import HarvestingAllocation
from models.errors import DomainError, InvalidCapacity, ParseError
from models.topology import NetworkTopology
from src.netgen import require_valid

FORMAT_VERSION = 1


def save_topology(topology):
    """
    Encode a valid topology as UTF-8 JSON bytes.

    Raises:
        TopologyValidationError: the topology is invalid
    """
    require_valid(topology)
    document = {
        'version': FORMAT_VERSION,
        'node_count': topology.node_count,
        'channel_loss': topology.channel_loss,
        'generation_rates': topology.generation_rates.tolist(),
        'positions': None if topology.positions is None else topology.positions.tolist(),
        'routing': [{'from': i + 1, 'to': j + 1, 'fraction': f} for i, j, f in topology.links()],
    }
    return json.dumps(document, indent=2).encode('utf-8')


def _decode(data):
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode('utf-8')
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc.reason}", f"byte {exc.start}") from exc
    try:
        document = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(document, dict):
        raise ParseError("expected a JSON object")
    version = document.get('version')
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported version {version!r}", '$.version')
    return document


def _require(document, key, kinds, where='$'):
    if key not in document:
        raise ParseError(f"missing field '{key}'", f"{where}.{key}")
    value = document[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        raise ParseError(f"field '{key}' has the wrong type", f"{where}.{key}")
    return value


def _number_list(values, length, where):
    if not isinstance(values, list) or len(values) != length:
        raise ParseError(f"expected a list of {length} entries", where)
    for k, value in enumerate(values):
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParseError("expected a number", f"{where}[{k}]")
    return values


def load_topology(data):
    """
    Decode and validate a topology document.

    Args:
        data: bytes or str holding the JSON document

    Returns:
        NetworkTopology

    Raises:
        ParseError: malformed document, with the location of the problem
        TopologyValidationError: well-formed but breaks an invariant
    """
    document = _decode(data)
    size = _require(document, 'node_count', int)
    if size < 2:
        raise ParseError("node_count must be at least 2", '$.node_count')
    channel_loss = _require(document, 'channel_loss', (int, float))
    rates = _number_list(_require(document, 'generation_rates', list), size, '$.generation_rates')

    positions = document.get('positions')
    if positions is not None:
        if not isinstance(positions, list) or len(positions) != size:
            raise ParseError(f"expected {size} positions", '$.positions')
        for k, point in enumerate(positions):
            _number_list(point, 2, f'$.positions[{k}]')

    entries = _require(document, 'routing', list)
    routing = np.zeros((size, size))
    for k, entry in enumerate(entries):
        where = f'$.routing[{k}]'
        if not isinstance(entry, dict):
            raise ParseError("expected an object", where)
        sender = _require(entry, 'from', int, where)
        receiver = _require(entry, 'to', int, where)
        fraction = _require(entry, 'fraction', (int, float), where)
        for key, index in (('from', sender), ('to', receiver)):
            if not 1 <= index <= size:
                raise ParseError(f"node index {index} outside 1..{size}", f"{where}.{key}")
        routing[receiver - 1, sender - 1] = fraction

    topology = NetworkTopology(size, routing, rates, channel_loss, positions)
    return require_valid(topology)


def save_allocation(allocation):
    document = {
        'version': FORMAT_VERSION,
        'scheme': allocation.scheme,
        'mu': allocation.mu.tolist(),
        'cap': allocation.cap.tolist(),
    }
    return json.dumps(document, indent=2).encode('utf-8')


def load_allocation(data, sensor_count=None):
    """
    Decode an allocation document.

    Args:
        data: bytes or str
        sensor_count: when given, the expected number of sensors
    """
    document = _decode(data)
    mu = _require(document, 'mu', list)
    count = len(mu) if sensor_count is None else sensor_count
    mu = _number_list(mu, count, '$.mu')
    cap = _number_list(_require(document, 'cap', list), count, '$.cap')
    scheme = document.get('scheme', 'custom')
    try:
        return HarvestingAllocation(mu, cap, str(scheme))
    except (DomainError, InvalidCapacity) as exc:
        raise ParseError(str(exc), '$') from exc


def simulation_report(outcome, flow, allocation):
    """Simulated outcome side by side with the analytic solution, as JSON bytes."""
    document = {
        'version': FORMAT_VERSION,
        'scheme': allocation.scheme,
        'simulation': outcome.to_dict(),
        'analytic': flow.to_dict(),
        'agrees': outcome.agrees_with(flow.network_loss),
    }
    return json.dumps(document, indent=2).encode('utf-8')


def write_bytes(path, payload):
    path = Path(path)
    if path.parent != Path('.'):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)
    return path


def read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from exc
