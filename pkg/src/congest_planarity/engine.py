"""Round-synchronous CONGEST simulator with bit-exact message accounting.

Payloads are nested tuples of ints, short strings and ``None``. Their size is
the length of a canonical compact binary encoding, so the per-edge budget is
checked against real serialized sizes. A payload wrapped in :class:`Chunked`
may exceed the budget; it then occupies the edge for ``ceil(bits / B)``
consecutive rounds and the trace records the inflation.

Two scheduling modes share one loop. In synchronous mode (``run``) every
live node is stepped every round until all halt. In event mode
(``Engine.execute``) only nodes with incoming messages, a wake-up request, or
in the start set are stepped, and the execution ends when the network is
quiet. Event-mode executions on one engine are composed back to back: each
starts in the round after the previous one went quiet, so the round counter
measures the whole protocol.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Protocol

from .graph.core import Graph

# ---------------------------------------------------------------------------
# errors and outputs
# ---------------------------------------------------------------------------


class EngineError(RuntimeError):
    pass


class BudgetExceeded(EngineError):
    def __init__(self, node: int, round_no: int, bits: int, budget: int) -> None:
        self.node, self.round, self.bits, self.budget = node, round_no, bits, budget
        super().__init__(f"node {node} sent {bits} bits in round {round_no} (budget {budget})")


class RoundLimitExceeded(EngineError):
    def __init__(self, limit: int) -> None:
        self.limit = limit
        super().__init__(f"nodes still running after {limit} rounds")


class VerdictChanged(EngineError):
    pass


class NotANeighbor(EngineError):
    pass


ACCEPT = "accept"
HALT = "halt"


@dataclass(frozen=True)
class Reject:
    evidence: str
    detail: Any = None


# ---------------------------------------------------------------------------
# canonical encoding
# ---------------------------------------------------------------------------
#
# Header byte: two type bits then six payload bits.
#   00xxxxxx  small non-negative int x < 64
#   01000000  other int, followed by LEB128 of its zigzag value
#   10llllll  sequence of length l < 63; 10111111 escapes to a varint length
#   11llllll  UTF-8 string of length l < 62; 62 encodes None; 63 escapes


def _varint_len(z: int) -> int:
    return max(1, (z.bit_length() + 6) // 7)


def _zigzag(x: int) -> int:
    return x << 1 if x >= 0 else ((-x) << 1) - 1


def encoded_size(x: Any) -> int:
    """Number of bytes in the canonical encoding of ``x``."""
    t = type(x)
    if t is int or t is bool:
        if 0 <= x < 64:
            return 1
        return 1 + _varint_len(_zigzag(int(x)))
    if t is tuple or t is list or isinstance(x, tuple):
        k = len(x)
        s = 1 if k < 63 else 1 + _varint_len(k)
        for item in x:
            s += encoded_size(item)
        return s
    if x is None:
        return 1
    if t is str:
        b = len(x.encode())
        return 1 + b if b < 62 else 1 + _varint_len(b) + b
    raise TypeError(f"unsupported payload type {t.__name__}")


def payload_bits(x: Any) -> int:
    return 8 * encoded_size(x)


def _put_varint(out: bytearray, z: int) -> None:
    while True:
        byte = z & 0x7F
        z >>= 7
        if z:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def encode(x: Any) -> bytes:
    out = bytearray()
    _encode_into(out, x)
    return bytes(out)


def _encode_into(out: bytearray, x: Any) -> None:
    if isinstance(x, (bool, int)):
        x = int(x)
        if 0 <= x < 64:
            out.append(x)
        else:
            out.append(0x40)
            _put_varint(out, _zigzag(x))
    elif isinstance(x, (tuple, list)):
        if len(x) < 63:
            out.append(0x80 | len(x))
        else:
            out.append(0xBF)
            _put_varint(out, len(x))
        for item in x:
            _encode_into(out, item)
    elif x is None:
        out.append(0xC0 | 62)
    elif isinstance(x, str):
        raw = x.encode()
        if len(raw) < 62:
            out.append(0xC0 | len(raw))
        else:
            out.append(0xFF)
            _put_varint(out, len(raw))
        out.extend(raw)
    else:
        raise TypeError(f"unsupported payload type {type(x).__name__}")


def decode(data: bytes) -> Any:
    value, pos = _decode_at(data, 0)
    if pos != len(data):
        raise ValueError("trailing bytes after payload")
    return value


def _get_varint(data: bytes, pos: int) -> tuple[int, int]:
    shift = z = 0
    while True:
        byte = data[pos]
        pos += 1
        z |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            return z, pos


def _decode_at(data: bytes, pos: int) -> tuple[Any, int]:
    head = data[pos]
    pos += 1
    kind, low = head >> 6, head & 0x3F
    if kind == 0:
        return low, pos
    if kind == 1:
        z, pos = _get_varint(data, pos)
        return (z >> 1) if not z & 1 else -((z + 1) >> 1), pos
    if kind == 2:
        length = low
        if low == 63:
            length, pos = _get_varint(data, pos)
        items = []
        for _ in range(length):
            item, pos = _decode_at(data, pos)
            items.append(item)
        return tuple(items), pos
    if low == 62:
        return None, pos
    length = low
    if low == 63:
        length, pos = _get_varint(data, pos)
    return data[pos : pos + length].decode(), pos + length


# ---------------------------------------------------------------------------
# program contract
# ---------------------------------------------------------------------------


class Chunked:
    """Marks a payload that may be split over several rounds on one edge."""

    __slots__ = ("payload",)

    def __init__(self, payload: Any) -> None:
        self.payload = payload

    def __repr__(self) -> str:
        return f"Chunked({self.payload!r})"


class Step(NamedTuple):
    """Result of one node transition.

    ``send`` is a list of ``(neighbor, payload)`` pairs; several payloads for
    the same neighbor are delivered in order on consecutive rounds. ``wake``
    asks to be stepped next round even without incoming messages.
    """

    state: Any
    send: list | None = None
    output: Any = None
    wake: bool = False


class NodeContext:
    """Read-only view a node has of itself during a transition."""

    __slots__ = ("_rng", "_seed", "n", "neighbor_set", "neighbors", "node", "round")

    def __init__(self, node: int, neighbors: tuple[int, ...], n: int, seed: int) -> None:
        self.node = node
        self.neighbors = neighbors
        self.neighbor_set = frozenset(neighbors)
        self.n = n
        self.round = 0
        self._seed = seed
        self._rng: random.Random | None = None

    @property
    def rng(self) -> random.Random:
        if self._rng is None:
            self._rng = random.Random(node_seed(self._seed, self.node))
        return self._rng


def node_seed(seed: int, node: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{node}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class NodeProgram(Protocol):
    def step(self, ctx: NodeContext, state: Any, inbox: Mapping[int, Any]) -> Step: ...


# ---------------------------------------------------------------------------
# trace
# ---------------------------------------------------------------------------


@dataclass
class Trace:
    budget_bits: int
    rounds_used: int = 0
    max_message_bits: int = 0
    total_messages: int = 0
    total_chunks: int = 0
    max_inflation: int = 1
    per_round: dict[int, list[int]] = field(default_factory=dict)
    verdicts: dict[int, Any] = field(default_factory=dict)
    modeled_round_credits: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def rejecting_nodes(self) -> list[int]:
        return sorted(v for v, out in self.verdicts.items() if isinstance(out, Reject))

    @property
    def verdict(self) -> str:
        return "reject" if self.rejecting_nodes else "accept"

    @property
    def inflated_messages(self) -> int:
        return self.total_chunks - self.total_messages

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds_used,
            "max_bits": self.max_message_bits,
            "messages": self.total_messages,
            "modeled_round_credits": self.modeled_round_credits,
            "verdict": self.verdict,
            "rejecting_nodes": self.rejecting_nodes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_budget(n: int) -> int:
    return 8 * math.ceil(math.log2(max(n, 2))) + 64


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

_EMPTY: dict = {}


class Engine:
    """Owns the network, per-node contexts, the round counter and the trace."""

    def __init__(
        self,
        network: Graph,
        budget_bits: int | None = None,
        max_rounds: int | None = None,
        seed: int = 0,
    ) -> None:
        budget = default_budget(network.n) if budget_bits is None else budget_bits
        if budget < 1:
            raise ValueError("budget_bits must be at least 1")
        if max_rounds is not None and max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        self.network = network
        self.budget = budget
        self.max_rounds = max_rounds
        self.seed = seed
        self.contexts = [NodeContext(v, network.neighbors(v), network.n, seed) for v in network.nodes()]
        self.trace = Trace(budget_bits=budget)
        self.round = 0
        self._size_cache: dict[Any, int] = {}

    # -- accounting -----------------------------------------------------------

    def charge_modeled(self, credits: int) -> None:
        self.trace.modeled_round_credits += credits

    def note(self, text: str) -> None:
        self.trace.notes.append(text)

    def _bits(self, payload: Any) -> int:
        if type(payload) is int:
            return 8 if 0 <= payload < 64 else 8 * encoded_size(payload)
        try:
            cached = self._size_cache.get(payload)
        except TypeError:
            cached = None
        if cached is None:
            cached = 8 * encoded_size(payload)
            try:
                if len(self._size_cache) < 200_000:
                    self._size_cache[payload] = cached
            except TypeError:
                pass
        return cached

    def record_output(self, v: int, output: Any) -> bool:
        """Store a verdict; returns True when the node halts."""
        if output is None:
            return False
        if output == HALT:
            return True
        if output != ACCEPT and not isinstance(output, Reject):
            raise EngineError(f"unknown output {output!r} from node {v}")
        prev = self.trace.verdicts.get(v)
        if prev is not None and prev != output:
            raise VerdictChanged(f"node {v} changed verdict from {prev!r} to {output!r}")
        self.trace.verdicts[v] = output
        return False

    # -- execution --------------------------------------------------------------

    def execute(
        self,
        program: NodeProgram,
        states: dict[int, Any],
        start: Iterable[int] | None = None,
        synchronous: bool = False,
    ) -> dict[int, Any]:
        """Run ``program`` until quiet (or, when synchronous, until every node halts).

        ``states`` is updated in place with each node's returned state.
        """
        trace = self.trace
        budget = self.budget
        contexts = self.contexts
        bits_of = self._bits
        step = program.step
        pending: dict[int, dict[int, dict[int, Any]]] = {}
        wakeups: dict[int, set[int]] = {}
        edge_free: dict[tuple[int, int], int] = {}
        halted: set[int] = set()
        first = self.round + 1
        r = first
        initial = sorted(self.network.nodes() if start is None else set(start))
        last_active = self.round

        while True:
            inboxes = pending.pop(r, _EMPTY)
            woken = wakeups.pop(r, None)
            if synchronous:
                nodes = [v for v in self.network.nodes() if v not in halted]
                if not nodes:
                    break
            else:
                if r == first:
                    todo = set(initial)
                    todo.update(inboxes)
                else:
                    todo = set(inboxes)
                if woken:
                    todo.update(woken)
                if not todo:
                    if not pending and not wakeups:
                        break
                    r = min(list(pending) + list(wakeups))
                    continue
                nodes = sorted(todo)
            if self.max_rounds is not None and r > self.max_rounds:
                raise RoundLimitExceeded(self.max_rounds)
            round_msgs = 0
            round_bits = 0
            for v in nodes:
                if v in halted:
                    continue
                ctx = contexts[v]
                ctx.round = r
                result = step(ctx, states.get(v), inboxes.get(v, _EMPTY))
                states[v] = result.state
                if result.output is not None and self.record_output(v, result.output):
                    halted.add(v)
                if result.wake:
                    wakeups.setdefault(r + 1, set()).add(v)
                send = result.send
                if not send:
                    continue
                nbrs = ctx.neighbor_set
                for w, payload in send:
                    if w not in nbrs:
                        raise NotANeighbor(f"node {v} tried to message non-neighbor {w}")
                    if type(payload) is Chunked:
                        payload = payload.payload
                        bits = bits_of(payload)
                        chunks = -(-bits // budget)
                        if chunks > 1:
                            bits = budget
                    else:
                        bits = bits_of(payload)
                        if bits > budget:
                            raise BudgetExceeded(v, r, bits, budget)
                        chunks = 1
                    key = (v, w)
                    begin = edge_free.get(key, 0)
                    if begin <= r:
                        begin = r + 1
                    arrive = begin + chunks - 1
                    edge_free[key] = arrive + 1
                    slot = pending.get(arrive)
                    if slot is None:
                        slot = pending[arrive] = {}
                    box = slot.get(w)
                    if box is None:
                        slot[w] = {v: payload}
                    else:
                        box[v] = payload
                    round_msgs += 1
                    round_bits = max(round_bits, bits)
                    trace.total_chunks += chunks
                    trace.max_inflation = max(trace.max_inflation, chunks)
            if round_msgs:
                trace.total_messages += round_msgs
                trace.max_message_bits = max(trace.max_message_bits, round_bits)
                stats = trace.per_round.get(r)
                if stats is None:
                    trace.per_round[r] = [round_msgs, round_bits]
                else:
                    stats[0] += round_msgs
                    stats[1] = max(stats[1], round_bits)
            last_active = r
            r += 1

        self.round = max(self.round, last_active)
        trace.rounds_used = self.round
        return states


DEFAULT_MAX_ROUNDS = 100_000


def run(
    network: Graph,
    program: NodeProgram,
    budget_bits: int | None = None,
    max_rounds: int | None = None,
    seed: int = 0,
    states: dict[int, Any] | None = None,
) -> Trace:
    """Execute ``program`` synchronously on every node until all nodes halt.

    Without an explicit ``max_rounds`` a cap of 100000 rounds guards against
    programs that never halt.
    """
    engine = Engine(network, budget_bits, DEFAULT_MAX_ROUNDS if max_rounds is None else max_rounds, seed)
    engine.execute(program, {} if states is None else states, synchronous=True)
    return engine.trace
