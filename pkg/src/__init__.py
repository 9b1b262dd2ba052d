"""NativE: adversarial multi-modal knowledge graph completion."""
