# Shared exceptions and execution helpers
