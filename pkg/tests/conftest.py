"""Makes this directory importable so tests can share the helpers module."""
