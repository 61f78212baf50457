"""Test suite for macgame."""
