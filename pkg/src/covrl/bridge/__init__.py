"""Stimulus server and newline-delimited JSON wire protocol."""

from covrl.bridge.protocol import (
    Done,
    Error,
    Hello,
    Request,
    Stimulus,
    WireMessage,
    decode_message,
    encode_message,
)
from covrl.bridge.server import BridgeLimits, BridgeServer, BridgeSession, serve

__all__ = [
    "BridgeLimits",
    "BridgeServer",
    "BridgeSession",
    "Done",
    "Error",
    "Hello",
    "Request",
    "Stimulus",
    "WireMessage",
    "decode_message",
    "encode_message",
    "serve",
]
