import numpy as np


class FlowLogger:
    def __init__(self):

        # Accepted iterates
        self.energies = []
        self.step_sizes = []
        self.residuals = []

        # Rejected trial steps (energy increase, positivity loss or singular solve)
        self.rejections = 0
        self.iterations = 0

    def log_iteration(self, energy, step_size, residual=None):
        self.energies.append(float(energy))
        self.step_sizes.append(float(step_size))
        if residual is not None:
            self.residuals.append(float(residual))
        self.iterations += 1

    def log_rejection(self):
        self.rejections += 1

    def reset(self):
        self.energies = []
        self.step_sizes = []
        self.residuals = []
        self.rejections = 0
        self.iterations = 0

    def max_energy_increase(self):
        """Largest relative increase between consecutive accepted energies (<= 0 for a monotone flow)."""
        if len(self.energies) < 2:
            return 0.0
        energies = np.asarray(self.energies)
        scale = np.maximum(np.abs(energies[:-1]), 1.0)
        return float(np.max(np.diff(energies) / scale))

    def get_stats(self):
        return {
            'iterations': self.iterations,
            'rejections': self.rejections,
            'energies': self.energies,
            'final_energy': self.energies[-1] if self.energies else None,
            'max_energy_increase': self.max_energy_increase(),
            'step_sizes': self.step_sizes,
            'min_step_size': float(np.min(self.step_sizes)) if self.step_sizes else None,
            'residuals': self.residuals,
        }
