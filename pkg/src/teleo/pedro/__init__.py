"""Pedro-style publish/subscribe messaging over newline-terminated TCP frames."""

from .codec import WireMessage, decode, encode
from .routing import Subscription, broker_route, evaluate_body
from .broker import Broker
from .client import Session, connect

DEFAULT_PORT = 4550

__all__ = [
    "WireMessage", "encode", "decode", "Subscription", "broker_route", "evaluate_body",
    "Broker", "Session", "connect", "DEFAULT_PORT",
]
