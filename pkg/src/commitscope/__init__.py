"""Mining influential software changes from git history and issue archives."""

__version__ = "0.1.0"
