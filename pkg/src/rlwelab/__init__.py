"""Ring-LWE KEM laboratory: NewHope-style encryption with pluggable error
correction and an exact decryption-failure-rate analyzer."""

__version__ = "0.1.0"
