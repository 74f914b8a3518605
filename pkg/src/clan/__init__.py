"""Distributed NEAT with clan-sharded asynchronous speciation."""

__version__ = "0.1.0"
