"""Tests for LocalComplexity."""
