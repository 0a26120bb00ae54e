"""Configuration and fabrication settings."""
