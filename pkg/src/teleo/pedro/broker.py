"""A threaded Pedro-style broker.

Three listening sockets: the main port hands out ``host ackport dataport``;
clients then open an ack channel (which yields their id) and a data channel
(on which they send their id and receive ``ok``). Every line a client sends on
the data channel is acknowledged with ``1`` or ``0`` on the ack channel.
"""

from __future__ import annotations

import itertools
import logging
import socket
import threading
from dataclasses import dataclass, field
from typing import Dict, List as PyList, Optional

from ..errors import TeleoError
from ..terms import Atom, Compound, Number, Term, format_term, is_ground
from .codec import decode
from .routing import Subscription, broker_route, delivery_line, valid_body

log = logging.getLogger(__name__)

HANDSHAKE_TIMEOUT = 5.0
_FORBIDDEN_NAME_CHARS = set(",:@")


@dataclass(eq=False)
class _Session:
    client_id: int
    ack: socket.socket
    data: Optional[socket.socket] = None
    name: Optional[str] = None
    write_lock: threading.Lock = field(default_factory=threading.Lock)

    def send_data(self, raw: bytes):
        with self.write_lock:
            self.data.sendall(raw)

    def close(self):
        for s in (self.ack, self.data):
            if s is not None:
                try:
                    s.close()
                except OSError:
                    pass


def _listener(host: str, port: int) -> socket.socket:
    s = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    s.bind((host, port))
    s.listen(64)
    return s


class Broker:
    """Run with ``start()``/``stop()`` or as a context manager."""

    def __init__(self, host: str = "127.0.0.1", port: int = 4550):
        self.host = host
        self._main = _listener(host, port)
        self._ack = _listener(host, 0)
        self._data = _listener(host, 0)
        self.port = self._main.getsockname()[1]
        self.ack_port = self._ack.getsockname()[1]
        self.data_port = self._data.getsockname()[1]
        self._ids = itertools.count(1)
        self._sub_ids = itertools.count(1)
        self._lock = threading.Lock()
        self._pending: Dict[int, _Session] = {}
        self._sessions: Dict[int, _Session] = {}
        self._subs: PyList[Subscription] = []
        self._names: Dict[str, _Session] = {}
        self._threads: PyList[threading.Thread] = []
        self._stopping = threading.Event()

    # -- lifecycle

    def start(self) -> "Broker":
        for target, sock in ((self._serve_main, self._main), (self._serve_ack, self._ack), (self._serve_data, self._data)):
            t = threading.Thread(target=self._accept_loop, args=(sock, target), daemon=True)
            t.start()
            self._threads.append(t)
        log.info("broker listening on %s:%d (ack %d, data %d)", self.host, self.port, self.ack_port, self.data_port)
        return self

    def stop(self):
        self._stopping.set()
        for s in (self._main, self._ack, self._data):
            try:
                s.close()
            except OSError:
                pass
        with self._lock:
            sessions = list(self._sessions.values()) + list(self._pending.values())
        for sess in sessions:
            sess.close()

    def __enter__(self) -> "Broker":
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    def serve_forever(self):
        self.start()
        self._stopping.wait()

    def _accept_loop(self, listener: socket.socket, handler):
        while not self._stopping.is_set():
            try:
                conn, _ = listener.accept()
            except OSError:
                return
            threading.Thread(target=handler, args=(conn,), daemon=True).start()

    # -- handshake

    def _serve_main(self, conn: socket.socket):
        with conn:
            try:
                conn.sendall(f"{self.host} {self.ack_port} {self.data_port}\n".encode())
            except OSError:
                pass

    def _serve_ack(self, conn: socket.socket):
        cid = next(self._ids)
        sess = _Session(cid, conn)
        with self._lock:
            self._pending[cid] = sess
        try:
            conn.sendall(f"{cid}\n".encode())
        except OSError:
            self._drop(sess)

    def _serve_data(self, conn: socket.socket):
        conn.settimeout(HANDSHAKE_TIMEOUT)
        reader = conn.makefile("rb")
        try:
            line = reader.readline()
            cid = int(line.decode().strip())
        except (OSError, ValueError):
            conn.close()
            return
        with self._lock:
            sess = self._pending.pop(cid, None)
            if sess is not None:
                sess.data = conn
                self._sessions[cid] = sess
        if sess is None:
            try:
                conn.sendall(b"no\n")
            finally:
                conn.close()
            return
        conn.settimeout(None)
        sess.send_data(b"ok\n")
        self._session_loop(sess, reader)

    # -- session

    def _session_loop(self, sess: _Session, reader):
        try:
            while True:
                line = reader.readline()
                if not line:
                    break
                ok = self._handle(sess, line)
                sess.ack.sendall(b"1\n" if ok else b"0\n")
        except OSError:
            pass
        finally:
            self._drop(sess)

    def _drop(self, sess: _Session):
        with self._lock:
            self._sessions.pop(sess.client_id, None)
            self._pending.pop(sess.client_id, None)
            self._subs = [s for s in self._subs if s.owner is not sess]
            if sess.name is not None and self._names.get(sess.name) is sess:
                del self._names[sess.name]
        sess.close()

    def _handle(self, sess: _Session, line: bytes) -> bool:
        try:
            msg = decode(line)
        except (TeleoError, UnicodeDecodeError) as e:
            log.info("client %d sent a malformed line: %s", sess.client_id, e)
            return False
        if isinstance(msg, Compound) and msg.functor == "subscribe" and msg.arity == 3:
            return self._subscribe(sess, *msg.args)
        if isinstance(msg, Compound) and msg.functor in ("register", "deregister") and msg.arity == 1:
            name = msg.args[0]
            if not isinstance(name, Atom) or _FORBIDDEN_NAME_CHARS & set(name.name):
                return False
            return self._register(sess, name.name) if msg.functor == "register" else self._deregister(sess, name.name)
        if not is_ground(msg):
            return False
        with self._lock:
            subs = list(self._subs)
        for sub, payload in broker_route(msg, subs):
            try:
                sub.owner.send_data(delivery_line(sub.rock, payload))
            except OSError:
                log.info("delivery to client %d failed", sub.owner.client_id)
        return True

    def _subscribe(self, sess: _Session, head: Term, body: Term, rock: Term) -> bool:
        if not isinstance(head, (Atom, Compound)) or not valid_body(body):
            return False
        if not isinstance(rock, Number) or type(rock.value) is not int:
            return False
        with self._lock:
            self._subs.append(Subscription(next(self._sub_ids), head, body, rock.value, sess))
        log.debug("client %d subscribed to %s", sess.client_id, format_term(head))
        return True

    def _register(self, sess: _Session, name: str) -> bool:
        with self._lock:
            if name in self._names or sess.name is not None:
                return False
            self._names[name] = sess
            sess.name = name
        return True

    def _deregister(self, sess: _Session, name: str) -> bool:
        with self._lock:
            if self._names.get(name) is not sess:
                return False
            del self._names[name]
            sess.name = None
        return True

