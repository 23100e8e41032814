"""Experiment harness: configuration, sweep runner and command line."""
