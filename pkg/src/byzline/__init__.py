"""Byzantine search on the line: simulator, strategies and adversary search."""
