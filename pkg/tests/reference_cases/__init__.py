"""Parameter sets shared by the test suite (the published example systems)."""
