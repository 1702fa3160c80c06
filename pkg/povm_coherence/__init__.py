"""Resource theory of POVM-based coherence: Naimark extensions, coherence measures and incoherent channels."""

__version__ = "0.1.0"
