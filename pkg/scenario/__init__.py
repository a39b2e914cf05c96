"""Scenario documents: schema, parsing, validation and built-ins"""
