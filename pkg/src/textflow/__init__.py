"""Workflow-net extraction from dependency-parsed guideline text."""

__version__ = "0.1.0"
