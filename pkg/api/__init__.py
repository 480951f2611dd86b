"""REST API app."""
