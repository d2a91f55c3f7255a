import random
import socket
import threading

import pytest
from hypothesis import given, strategies as st

from teleo.errors import HandshakeError, TermSyntaxError, TransportError
from teleo.pedro import Broker, Subscription, broker_route, connect, decode, encode, evaluate_body
from teleo.pedro.routing import valid_body
from teleo.terms import Atom, Number, match, parse_term

from generators import random_term

P = parse_term


@pytest.fixture
def broker():
    with Broker(port=0) as b:
        yield b


def test_codec_frames():
    t = P('f("a\\nb",[1,2.5],X)')
    raw = encode(t)
    assert raw.endswith(b"\n") and raw.count(b"\n") == 1
    assert decode(raw) == t
    with pytest.raises(TermSyntaxError):
        decode(b"see(asteroid,,)\n")


@given(st.integers(0, 2**32 - 1))
def test_codec_round_trip(seed):
    t = random_term(random.Random(seed))
    assert decode(encode(t)) == t


def test_evaluate_body():
    assert evaluate_body(P("length(X)>0"), {"X": P("[a]")})
    assert evaluate_body(Atom("true"), {})
    assert not evaluate_body(P("length(X)>0 & length(X)<3"), {"X": P("[a,b,c]")})
    assert not evaluate_body(P("length(X)>0"), {})
    assert not evaluate_body(P("length(X)>0"), {"X": Atom("a")})
    assert evaluate_body(P("X+1 >= 2"), {"X": Number(1)})


def test_body_language():
    assert valid_body(P("true"))
    assert valid_body(P("length(X)>0 & X<3"))
    assert not valid_body(P("foo(X)"))


def _sub(i, head, body, rock=0):
    return Subscription(i, P(head), P(body), rock)


def test_broker_route():
    subs = [_sub(1, "controls(X)", "length(X)>0"), _sub(2, "percepts(P)", "true")]
    assert [s.id for s, _ in broker_route(P("controls([move_forward])"), subs)] == [1]
    assert broker_route(P("controls([])"), subs) == []
    assert broker_route(P("controls([x])"), subs[1:]) == []


@given(st.integers(0, 2**32 - 1))
def test_routing_soundness(seed):
    rng = random.Random(seed)
    heads = ["controls(X)", "f(X,Y)", "f(a,X)", "g(X)", "X"]
    bodies = ["true", "length(X)>0", "X>1", "length(X)<2 & length(X)>=0"]
    subs = [_sub(i, rng.choice(heads[:4]), rng.choice(bodies)) for i in range(5)]
    n = rng.choice([P("controls([a])"), P("controls([])"), P("f(a,2)"), P("g(3)"), P("f(b,[1,2])")])
    for sub, payload in broker_route(n, subs):
        ok, sigma = match(sub.head, payload, {})
        assert ok and evaluate_body(sub.body, sigma)


def test_raw_handshake(broker):
    """Steps: dial, read ports, close, dial ack, read id, dial data, send id, read status."""
    main = socket.create_connection(("127.0.0.1", broker.port), timeout=5)
    line = main.makefile("rb").readline()
    main.close()
    host, ack_port, data_port = line.decode().split()
    ack = socket.create_connection((host, int(ack_port)), timeout=5)
    cid = ack.makefile("rb").readline()
    assert cid.strip().isdigit()
    data = socket.create_connection((host, int(data_port)), timeout=5)
    data.sendall(cid)
    assert data.makefile("rb").readline() == b"ok\n"
    ack.close()
    data.close()


def test_notify_subscribe_and_filter(broker):
    with connect(port=broker.port) as pub, connect(port=broker.port) as sub:
        assert sub.subscribe(P("controls(X)"), P("length(X)>0"), 7)
        assert pub.notify(P("controls([])"))
        assert pub.notify(P("controls([move_forward])"))
        assert sub.next_delivery(5) == (7, P("controls([move_forward])"))
        assert sub.next_delivery(0.2) is None


def test_malformed_line_keeps_session(broker):
    with connect(port=broker.port) as s:
        assert s.send_raw(b"see(asteroid,,)\n") is False
        assert s.notify(P("controls([a])")) is True
        assert s.send_raw(b"subscribe(x,foo(1),0)\n") is False
        assert s.send_raw(b"f(X)\n") is False


def test_pipelined_acks_in_order(broker):
    with connect(port=broker.port) as s:
        assert s.send_lines([b"a\n", b"b(\n", b"c\n", b"[\n", b"d\n"]) == [True, False, True, False, True]


def test_registration(broker):
    with connect(port=broker.port) as a, connect(port=broker.port) as b:
        assert a.register("agent1")
        assert not b.register("agent1")
        assert a.deregister()
        assert not b.deregister("nobody")
        assert b.register("agent1")
        assert not a.send_raw(b"register(\"x\")\n")


def test_subscriptions_die_with_session(broker):
    with connect(port=broker.port) as pub:
        s = connect(port=broker.port)
        assert s.subscribe(P("ping"), Atom("true"), 1)
        s.close()
        assert pub.notify(P("ping"))  # no failure routing to a closed session
        assert pub.notify(P("ping"))


def _fake_broker(status: bytes):
    listeners = [socket.create_server(("127.0.0.1", 0)) for _ in range(3)]
    main, ack, data = listeners
    ports = [l.getsockname()[1] for l in listeners]

    def serve():
        c, _ = main.accept()
        c.sendall(f"127.0.0.1 {ports[1]} {ports[2]}\n".encode())
        c.close()
        a, _ = ack.accept()
        a.sendall(b"1\n")
        d, _ = data.accept()
        d.makefile("rb").readline()
        d.sendall(status)
        d.close()
        a.close()

    threading.Thread(target=serve, daemon=True).start()
    return ports[0], listeners


def test_refused_status():
    port, listeners = _fake_broker(b"no\n")
    with pytest.raises(HandshakeError):
        connect(port=port)
    for l in listeners:
        l.close()


def test_unreachable_port():
    s = socket.create_server(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    with pytest.raises(TransportError):
        connect(port=port, timeout=1)
