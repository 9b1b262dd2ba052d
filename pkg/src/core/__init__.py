"""Core numerics: autodiff, datasets, the fusion model, adversarial training, evaluation."""
