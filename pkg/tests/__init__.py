"""fluxgate test suite."""
