import os


class LockstepError(AssertionError):
    """Live particles stopped at different observe sites in one round."""


def debug_enabled() -> bool:
    """``INFER_DEBUG=1`` turns on address and lockstep assertions."""
    return os.environ.get("INFER_DEBUG") == "1"
