"""HTTP service exposing the detector."""
