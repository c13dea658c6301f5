"""Simulator contract: synchrony, accounting, bandwidth, determinism."""

import pytest

from facloc.simulator import (
    BandwidthExceeded,
    Inbox,
    LinkOveruse,
    Message,
    NodeProgram,
    Payload,
    RoundLimitExceeded,
    RoundRng,
    Trace,
    bandwidth_budget,
    broadcast_outbox,
    payload_bits,
    run,
    word_bits,
)


class HaltNow(NodeProgram):
    def on_round(self, ctx, inbox):
        ctx.halt("done")


class BroadcastIdOnce(NodeProgram):
    def on_init(self, node, n, local_input):
        self.node = node

    def on_round(self, ctx, inbox):
        if ctx.round == 1:
            assert len(inbox) == 0  # nothing sent yet can be readable
            ctx.broadcast(Payload("id", (self.node,)))
        else:
            seen = [src for src, _ in inbox]
            assert seen == sorted(seen)
            ctx.halt(tuple(seen))


def test_immediate_halt_counts_one_round():
    trace = run([HaltNow() for _ in range(5)])
    assert trace.rounds == 1
    assert trace.messages_total == 0
    assert trace.outputs == ("done",) * 5


def test_clique_broadcast_semantics():
    trace = run([BroadcastIdOnce() for _ in range(4)])
    assert trace.rounds == 2
    assert trace.messages_total == 12  # 4 broadcasts, 3 receivers each
    for node, out in enumerate(trace.outputs):
        assert out == tuple(i for i in range(4) if i != node)


class CoinFlipper(NodeProgram):
    def on_round(self, ctx, inbox):
        if ctx.round < 3:
            ctx.broadcast(Payload("bit", (1 if ctx.rng.random() < 0.5 else 0,)))
        else:
            ctx.halt(tuple(sorted((src, p.fields[0]) for src, p in inbox)))


def test_replay_is_bit_identical():
    a = run([CoinFlipper() for _ in range(6)], seed=42)
    b = run([CoinFlipper() for _ in range(6)], seed=42)
    assert a == b
    c = run([CoinFlipper() for _ in range(6)], seed=43)
    assert c.outputs != a.outputs


def test_payload_variant_limits():
    with pytest.raises(BandwidthExceeded):
        Payload("big", (1, 2, 3, 4))
    with pytest.raises(BandwidthExceeded):
        Payload("two-reals", (1.5, 2.5))
    p = Payload("ok", (1, 2, 0.5))
    assert payload_bits(p, 10) == 4 * word_bits(10)
    assert payload_bits(p, 10) <= bandwidth_budget(10)


def test_broadcast_outbox():
    msgs = broadcast_outbox(0, 3, Payload("r", (1.5,)))
    assert [m.dst for m in msgs] == [1, 2]
    assert all(m.src == 0 and m.payload.fields == (1.5,) for m in msgs)
    assert broadcast_outbox(0, 1, Payload("r", (1.5,))) == []


class DoubleSender(NodeProgram):
    def on_round(self, ctx, inbox):
        if ctx.node == 0:
            ctx.send(1, Payload("a"))
            ctx.send(1, Payload("b"))
        ctx.halt()


class SendAfterBroadcast(NodeProgram):
    def on_round(self, ctx, inbox):
        if ctx.node == 0:
            ctx.broadcast(Payload("a"))
            ctx.send(1, Payload("b"))
        ctx.halt()


def test_link_overuse_detected():
    with pytest.raises(LinkOveruse):
        run([DoubleSender() for _ in range(2)])
    with pytest.raises(LinkOveruse):
        run([SendAfterBroadcast() for _ in range(2)])


class NeverHalts(NodeProgram):
    def on_round(self, ctx, inbox):
        pass


def test_round_limit():
    with pytest.raises(RoundLimitExceeded):
        run([NeverHalts()], max_rounds=7)


def test_inbox_excludes_own_broadcast():
    ledger = [(0, Payload("x")), (1, Payload("y")), (2, Payload("z"))]
    inbox = Inbox(1, ledger, [])
    assert [src for src, _ in inbox] == [0, 2]
    assert len(inbox) == 2


def test_inbox_merges_direct_by_source():
    ledger = [(2, Payload("b"))]
    direct = [Message(0, 1, Payload("d0")), Message(3, 1, Payload("d3"))]
    inbox = Inbox(1, ledger, direct)
    assert [src for src, _ in inbox] == [0, 2, 3]


def test_round_rng_is_reproducible_and_uniform():
    a = RoundRng(7, 3, 11)
    b = RoundRng(7, 3, 11)
    seq = [a.random() for _ in range(5)]
    assert seq == [b.random() for _ in range(5)]
    assert RoundRng(7, 3, 12).random() != seq[0]
    draws = [RoundRng(1, n, 1).random() for n in range(4000)]
    assert 0.47 < sum(draws) / len(draws) < 0.53
    assert all(0.0 <= d < 1.0 for d in draws)


def test_trace_json_shape():
    trace = run([BroadcastIdOnce() for _ in range(3)])
    data = trace.to_dict()
    assert set(data) == {"rounds", "messages", "per_round"}
    assert data["rounds"] == len(data["per_round"]) == 2
    assert data["per_round"][0] == [6, 2 * word_bits(3)]
    assert all(bits <= bandwidth_budget(3) for _, bits in data["per_round"])


def test_trace_per_round_accounting():
    trace = run([BroadcastIdOnce() for _ in range(4)])
    assert sum(m for m, _ in trace.per_round) == trace.messages_total
    assert isinstance(trace, Trace)
