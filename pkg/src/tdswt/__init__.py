"""Time-dependent Schrieffer-Wolff tools for flux-controlled transmon gates."""
