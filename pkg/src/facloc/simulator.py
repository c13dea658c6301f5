"""Deterministic round-synchronous simulator of a fully connected network.

Model contract:

* Rounds are global.  Everything a node sends during round t is delivered,
  all at once, at the start of round t + 1; nothing sent in round t is
  readable in round t.
* Each ordered pair (src, dst) carries at most one message per round.  A
  broadcast occupies every outgoing link of its sender for the round.
* Payloads are tagged tuples of at most three scalar fields (node indices,
  integers, at most one real).  The bandwidth model charges one machine word
  of ceil(log2(n + 1)) bits per slot (tag plus each field); the per-message
  budget is WORDS_PER_MESSAGE such words.  A real number is deliberately
  charged as a single word: inputs are assumed representable in one word.
* Per-node randomness is a counter-based stream keyed by (seed, node, round),
  so a run is a pure function of (programs, inputs, seed).

Node programs are state machines: ``on_init`` receives the node's local
input, then ``on_round`` runs once per round with the inbox (sorted by
source) and a context used to send, broadcast, read the round's randomness
stream, and halt with an output.  The run ends in the round during which the
last node halts.

Broadcasts are kept on a per-round ledger shared by every inbox instead of
being materialized per receiver; accounting (message counts, bandwidth,
link use) is unchanged, but large-n broadcast rounds stay affordable.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from hashlib import blake2b

WORDS_PER_MESSAGE = 8
MAX_PAYLOAD_FIELDS = 3


class SimulationError(RuntimeError):
    pass


class BandwidthExceeded(SimulationError):
    pass


class LinkOveruse(SimulationError):
    pass


class RoundLimitExceeded(SimulationError):
    pass


def word_bits(n: int) -> int:
    """Bits in one machine word for an n-node network: ceil(log2(n + 1))."""
    return max(1, math.ceil(math.log2(n + 1)))


def bandwidth_budget(n: int) -> int:
    """Per-message budget in bits."""
    return WORDS_PER_MESSAGE * word_bits(n)


def _scalar(value):
    if isinstance(value, float):
        return value
    try:
        return int(value)
    except TypeError:
        raise BandwidthExceeded(f"payload fields must be scalars, got {type(value).__name__}")


@dataclass(frozen=True, slots=True)
class Payload:
    """Tagged message body: a short tag plus at most three scalar fields."""

    tag: str
    fields: tuple = ()

    def __post_init__(self):
        fields = tuple(_scalar(v) for v in self.fields)
        if len(fields) > MAX_PAYLOAD_FIELDS:
            raise BandwidthExceeded(
                f"payload carries {len(fields)} fields, limit is {MAX_PAYLOAD_FIELDS}"
            )
        if sum(isinstance(v, float) for v in fields) > 1:
            raise BandwidthExceeded("payload may carry at most one real-valued field")
        object.__setattr__(self, "fields", fields)


def payload_bits(payload: Payload, n: int) -> int:
    """Serialized size under the one-word-per-slot model."""
    return (1 + len(payload.fields)) * word_bits(n)


@dataclass(frozen=True, slots=True)
class Message:
    src: int
    dst: int
    payload: Payload


def broadcast_outbox(src: int, n: int, payload: Payload) -> list[Message]:
    """One identical message per other node (clique broadcast)."""
    if payload_bits(payload, n) > bandwidth_budget(n):
        raise BandwidthExceeded("payload exceeds the per-message budget")
    return [Message(src, dst, payload) for dst in range(n) if dst != src]


class Inbox:
    """One round's arrivals for one node, iterable in source order.

    ``broadcasts`` is the raw shared ledger of the previous round's
    broadcasts, (src, payload) pairs in source order, including the node's
    own entry; iteration skips the node's own broadcast.  ``direct`` holds
    point-to-point messages addressed to this node, sorted by source.
    """

    __slots__ = ("node", "broadcasts", "direct")

    def __init__(self, node: int, broadcasts: list, direct: list):
        self.node = node
        self.broadcasts = broadcasts
        self.direct = direct

    def __iter__(self):
        bc, direct = self.broadcasts, self.direct
        i = j = 0
        while i < len(bc) or j < len(direct):
            if j >= len(direct) or (i < len(bc) and bc[i][0] < direct[j].src):
                src, payload = bc[i]
                i += 1
                if src == self.node:
                    continue
            else:
                msg = direct[j]
                j += 1
                src, payload = msg.src, msg.payload
            yield src, payload

    def __len__(self):
        own = any(src == self.node for src, _ in self.broadcasts)
        return len(self.broadcasts) - own + len(self.direct)


class RoundRng:
    """Counter-based uniform stream keyed by (seed, node, round).

    Platform-independent: each draw hashes the key and a call counter, so
    replaying a run reproduces every coin flip bit for bit.
    """

    __slots__ = ("_key", "_counter")

    def __init__(self, seed: int, node: int, round_no: int):
        self._key = struct.pack(
            "<qqq", seed & 0x7FFFFFFFFFFFFFFF, node, round_no
        )
        self._counter = 0

    def random(self) -> float:
        h = blake2b(self._key + struct.pack("<q", self._counter), digest_size=8)
        self._counter += 1
        return (int.from_bytes(h.digest(), "little") >> 11) / float(1 << 53)

    def randrange(self, n: int) -> int:
        # Rejection sampling keeps the draw exactly uniform.
        span = 1 << 53
        limit = span - span % n
        while True:
            v = int(self.random() * span)
            if v < limit:
                return v % n


class NodeProgram:
    """Base class for per-node state machines run by :func:`run`."""

    def on_init(self, node: int, n: int, local_input) -> None:
        pass

    def on_round(self, ctx: "Context", inbox: Inbox) -> None:
        raise NotImplementedError


class Context:
    """Per-(node, round) view handed to ``on_round``; valid only during the call."""

    __slots__ = ("n", "node", "round", "_seed", "_rng", "_bcast", "_direct", "halted", "output")

    def __init__(self, n: int, seed: int):
        self.n = n
        self._seed = seed

    def _reset(self, node: int, round_no: int):
        self.node = node
        self.round = round_no
        self._rng = None
        self._bcast = None
        self._direct = None
        self.halted = False
        self.output = None

    @property
    def rng(self) -> RoundRng:
        if self._rng is None:
            self._rng = RoundRng(self._seed, self.node, self.round)
        return self._rng

    def send(self, dst: int, payload: Payload) -> None:
        if dst == self.node:
            raise ValueError("a node cannot send a message to itself")
        if not 0 <= dst < self.n:
            raise ValueError(f"destination {dst} out of range")
        if self._direct is None:
            self._direct = []
        self._direct.append((dst, payload))

    def broadcast(self, payload: Payload) -> None:
        if self._bcast is not None:
            raise LinkOveruse(f"node {self.node} broadcast twice in round {self.round}")
        self._bcast = payload

    def halt(self, output=None) -> None:
        self.halted = True
        self.output = output


@dataclass(frozen=True)
class Trace:
    """Round, message, and bandwidth accounting for one run."""

    rounds: int
    messages_total: int
    per_round: tuple    # (messages sent, max payload bits) per round
    outputs: tuple      # per-node halt outputs
    n: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "messages": self.messages_total,
            "per_round": [list(pr) for pr in self.per_round],
        }


def run(programs, local_inputs=None, seed: int = 0, max_rounds: int = 10_000) -> Trace:
    """Execute one synchronous run until every node halts.

    Raises :class:`RoundLimitExceeded` if any node is still live after
    ``max_rounds`` rounds, :class:`BandwidthExceeded` for an oversized
    payload, and :class:`LinkOveruse` when an ordered pair carries more than
    one message in a round.
    """
    n = len(programs)
    if n < 1:
        raise ValueError("need at least one node")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    budget = bandwidth_budget(n)

    for node, program in enumerate(programs):
        program.on_init(node, n, None if local_inputs is None else local_inputs[node])

    ctx = Context(n, seed)
    halted = [False] * n
    outputs = [None] * n
    live = n
    prev_bcast: list = []
    prev_direct: dict[int, list] = {}
    per_round = []
    messages_total = 0
    empty: list = []

    round_no = 0
    while True:
        round_no += 1
        if round_no > max_rounds:
            raise RoundLimitExceeded(f"{live} nodes still live after {max_rounds} rounds")

        cur_bcast: list = []
        cur_direct: dict[int, list] = {}
        round_msgs = 0
        round_bits = 0

        for node in range(n):
            if halted[node]:
                continue
            inbox = Inbox(node, prev_bcast, prev_direct.get(node, empty))
            ctx._reset(node, round_no)
            programs[node].on_round(ctx, inbox)

            if ctx._bcast is not None:
                bits = payload_bits(ctx._bcast, n)
                if bits > budget:
                    raise BandwidthExceeded(
                        f"broadcast of {bits} bits from node {node} exceeds budget {budget}"
                    )
                cur_bcast.append((node, ctx._bcast))
                round_msgs += n - 1
                round_bits = max(round_bits, bits)
            if ctx._direct:
                seen = set()
                for dst, payload in ctx._direct:
                    if dst in seen or ctx._bcast is not None:
                        raise LinkOveruse(
                            f"link ({node}, {dst}) used more than once in round {round_no}"
                        )
                    seen.add(dst)
                    bits = payload_bits(payload, n)
                    if bits > budget:
                        raise BandwidthExceeded(
                            f"message of {bits} bits from node {node} exceeds budget {budget}"
                        )
                    cur_direct.setdefault(dst, []).append(Message(node, dst, payload))
                    round_msgs += 1
                    round_bits = max(round_bits, bits)
            if ctx.halted:
                halted[node] = True
                outputs[node] = ctx.output
                live -= 1

        per_round.append((round_msgs, round_bits))
        messages_total += round_msgs
        if live == 0:
            break
        # Senders are processed in ascending node order, so direct inboxes
        # arrive already sorted by source.
        prev_bcast = cur_bcast
        prev_direct = cur_direct

    return Trace(
        rounds=round_no,
        messages_total=messages_total,
        per_round=tuple(per_round),
        outputs=tuple(outputs),
        n=n,
        seed=seed,
    )
