"""
Coding Module - Alphabets, network codes and the end-to-end channel.

This module is responsible for:
- Alphabets and small finite fields (lookup tables)
- Network codes as dense function tables
- Transmission of codewords and unambiguity checking with witnesses
- Linearity checks and the certificate file format

Module Boundaries:
- Publishes: Alphabet, NetworkCode, OuterCode, Certificate, transmit, is_unambiguous
- Consumes: Network and EdgeOrder from the networks module
"""
