"""Reach-avoid herding of an adversarial agent with a virtual fence of defenders."""

__version__ = "0.1.0"
