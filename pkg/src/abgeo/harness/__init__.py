"""Instance generation, check registry, sharpness probes and campaigns."""
