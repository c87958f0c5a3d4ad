"""Process-wide logging setup."""
