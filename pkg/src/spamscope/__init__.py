"""spamscope: offline analytics for spam, bots and diffusion in tweet archives."""

__version__ = "0.1.0"
