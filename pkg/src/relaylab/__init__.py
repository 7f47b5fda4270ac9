"""relaylab: delay-limited HARQ with opportunistic relay selection over Rayleigh fading."""

__version__ = "0.1.0"
