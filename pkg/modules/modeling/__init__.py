"""
Modeling Module - Binary feasibility model for unambiguous pairs.

This module is responsible for:
- Building the x / y / z / w variables and the constraint rows
- McCormick linearization, routing fixings and symmetry breaking
- Export to LP and MPS text through PuLP, with a JSON sidecar
- Encoding pairs as 0/1 assignments and decoding solutions back

Module Boundaries:
- Publishes: FeasibilityModel, build_model, export_model, model_stats
- Consumes: networks (Network, EdgeOrder), coding (Alphabet, NetworkCode, transmit)
"""
