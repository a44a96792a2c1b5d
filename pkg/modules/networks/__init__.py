"""
Networks Module - Handles single-source multicast networks.

This module is responsible for:
- Validating candidate networks against the network axioms
- Extending the path partial order on edges to a total order
- Computing min-cuts and the min-cut bound mu
- The supersource and routing transforms
- Loading built-in instances and network files

Module Boundaries:
- Publishes: Network, EdgeOrder, CutValue
- Consumes: nothing from other business modules
"""
