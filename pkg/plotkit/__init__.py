"""Paper-style figure scripts for the kposim CLI's CSV/manifest outputs."""
