"""S/I/Q epidemic toolkit."""
