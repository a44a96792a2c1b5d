"""
Django configuration package for the netcap modular monolith.
"""
