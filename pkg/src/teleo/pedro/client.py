"""Blocking Pedro client: handshake, acknowledged sends and a delivery queue."""

from __future__ import annotations

import logging
import queue
import socket
import threading
from typing import Iterable, List as PyList, Optional, Tuple

from ..errors import HandshakeError, TeleoError, TransportError
from ..terms import Atom, Compound, Number, Term
from .codec import decode, encode

log = logging.getLogger(__name__)

TIMEOUT = 5.0


def _dial(host: str, port: int, timeout: float) -> socket.socket:
    try:
        return socket.create_connection((host, port), timeout=timeout)
    except OSError as e:
        raise TransportError(f"cannot connect to {host}:{port}: {e}") from e


def _read_line(f, what: str) -> bytes:
    try:
        line = f.readline()
    except socket.timeout as e:
        raise HandshakeError(f"timed out waiting for {what}") from e
    except OSError as e:
        raise TransportError(f"connection lost waiting for {what}: {e}") from e
    if not line.endswith(b"\n"):
        raise HandshakeError(f"connection closed before {what}")
    return line


class Session:
    """One client connection. Deliveries arrive on ``deliveries`` as ``(rock, term)``."""

    def __init__(self, ack: socket.socket, data: socket.socket, client_id: int, data_reader, timeout: float):
        self.client_id = client_id
        self._ack = ack
        self._data = data
        self._ack_reader = ack.makefile("rb")
        self._data_reader = data_reader
        self._send_lock = threading.Lock()
        self.registered_name: Optional[str] = None
        self.deliveries: "queue.Queue[Tuple[int, Term]]" = queue.Queue()
        self.closed = threading.Event()
        ack.settimeout(timeout)
        data.settimeout(None)
        self._reader = threading.Thread(target=self._read_deliveries, daemon=True)
        self._reader.start()

    def _read_deliveries(self):
        try:
            for line in self._data_reader:
                text = line.decode("utf-8").rstrip("\r\n")
                rock, sep, payload = text.partition(" : ")
                try:
                    self.deliveries.put((int(rock), decode(payload.encode("utf-8"))))
                except (ValueError, TeleoError) as e:
                    log.warning("ignoring malformed delivery %r: %s", text, e)
        except (OSError, ValueError):
            pass
        finally:
            self.closed.set()

    # -- sending

    def send_lines(self, raws: Iterable[bytes]) -> PyList[bool]:
        """Write raw frames back to back, then collect one ack per frame in order."""
        raws = list(raws)
        with self._send_lock:
            try:
                self._data.sendall(b"".join(raws))
                acks = [self._ack_reader.readline() for _ in raws]
            except OSError as e:
                raise TransportError(f"send failed: {e}") from e
        for a in acks:
            if a not in (b"1\n", b"0\n"):
                raise TransportError(f"bad acknowledgement {a!r}")
        return [a == b"1\n" for a in acks]

    def send_raw(self, raw: bytes) -> bool:
        return self.send_lines([raw])[0]

    def notify(self, payload: Term) -> bool:
        return self.send_raw(encode(payload))

    def subscribe(self, head: Term, body: Term = Atom("true"), rock: int = 0) -> bool:
        return self.notify(Compound("subscribe", (head, body, Number(rock))))

    def register(self, name: str) -> bool:
        ok = self.notify(Compound("register", (Atom(name),)))
        if ok:
            self.registered_name = name
        return ok

    def deregister(self, name: Optional[str] = None) -> bool:
        name = name or self.registered_name
        if name is None:
            return False
        ok = self.notify(Compound("deregister", (Atom(name),)))
        if ok and name == self.registered_name:
            self.registered_name = None
        return ok

    def next_delivery(self, timeout: Optional[float] = None) -> Optional[Tuple[int, Term]]:
        try:
            return self.deliveries.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self):
        for s in (self._ack, self._data):
            try:
                s.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            s.close()

    def __enter__(self) -> "Session":
        return self

    def __exit__(self, *exc):
        self.close()


def connect(host: str = "127.0.0.1", port: int = 4550, timeout: float = TIMEOUT) -> Session:
    """Run the connection handshake and return an established session."""
    main = _dial(host, port, timeout)
    with main:
        line = _read_line(main.makefile("rb"), "the port line")
    parts = line.decode("utf-8", "replace").split()
    if len(parts) != 3 or not parts[1].isdigit() or not parts[2].isdigit():
        raise HandshakeError(f"malformed port line {line!r}")
    addr, ack_port, data_port = parts[0], int(parts[1]), int(parts[2])
    # the advertised address may be a name the client cannot resolve; fall back to the dialled host
    ack_host = addr if addr not in ("0.0.0.0", "") else host
    try:
        ack = _dial(ack_host, ack_port, timeout)
    except TransportError:
        ack = _dial(host, ack_port, timeout)
    id_line = _read_line(ack.makefile("rb"), "the client id")
    try:
        client_id = int(id_line.decode().strip())
    except ValueError as e:
        ack.close()
        raise HandshakeError(f"malformed client id {id_line!r}") from e
    data = _dial(ack.getpeername()[0], data_port, timeout)
    try:
        data.sendall(f"{client_id}\n".encode())
        reader = data.makefile("rb")
        status = _read_line(reader, "the status")
    except (OSError, HandshakeError):
        ack.close()
        data.close()
        raise
    if status != b"ok\n":
        ack.close()
        data.close()
        raise HandshakeError(f"broker refused the connection: status {status!r}")
    return Session(ack, data, client_id, reader, timeout)


def notify(session: Session, payload: Term) -> bool:
    return session.notify(payload)


def deregister(session: Session) -> bool:
    return session.deregister()
