"""Unit test package for relaylab."""
