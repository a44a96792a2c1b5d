"""
Business modules package.

One module per capability: networks, coding, modeling, search and the cli
front end. Dependencies point one way, from cli down to networks.
"""
