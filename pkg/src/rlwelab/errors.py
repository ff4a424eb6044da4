"""Exception types shared across the package."""


class RlweLabError(Exception):
    pass


class ParameterError(RlweLabError, ValueError):
    """Invalid or mismatched parameter set."""


class UnsupportedModulusError(ParameterError):
    """The modulus has no primitive 2n-th root of unity, so the NTT is unavailable."""


class CapacityError(ParameterError):
    """An encoding does not fit into the ring dimension."""


class EncodeError(RlweLabError, ValueError):
    pass


class MalformedInputError(RlweLabError, ValueError):
    """Byte string or compressed coefficient outside the valid domain."""


class DecodeFailure(RlweLabError):
    """An error-correcting decoder could not recover a valid message.

    This is an expected outcome under heavy noise, not a programming error.
    """


class PrecisionError(RlweLabError, ArithmeticError):
    """Results did not agree when recomputed at doubled working precision."""
