"""JSON Schema documents for every payload the service accepts or emits."""
