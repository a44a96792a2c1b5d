"""
Shared utilities and cross-cutting concerns.

Exceptions and exit codes, tuple indexing helpers and timing, used by every
module without depending on any of them.
"""
