"""Scenario files, presets, sweeps and the ``ramac`` command line."""
