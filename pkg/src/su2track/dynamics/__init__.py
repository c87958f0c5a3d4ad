"""Plant dynamics, integration, flatness expansion and reference generators."""
