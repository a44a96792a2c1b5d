"""
CLI Module - Command-line front end.

This module is responsible for:
- The ``netcap`` management command and ``runner.run(argv)``
- Resolving networks (files or built-ins) and alphabets from flags
- Rendering reports as text or JSON, and mapping outcomes to exit codes

Module Boundaries:
- Publishes: run, parse_network_file
- Consumes: networks, coding, modeling, search services
"""
