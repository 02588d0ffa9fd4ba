"""Configuration files and result export."""
