"""
Search Module - Native exact search for unambiguous pairs.

This module is responsible for:
- Deciding whether a pair of a given size exists (depth-first search with propagation)
- Capacity loops, general and linear, with supersource back-translation
- Verifying certificates by re-simulation
- A brute-force oracle for tiny instances

Module Boundaries:
- Publishes: decide_feasible, max_code_size, linear_max_code_size, verify_certificate,
  brute_force_oracle, SearchOptions, CapacityResult
- Consumes: networks (Network, mu, add_supersource), coding (Certificate, is_unambiguous)
"""
