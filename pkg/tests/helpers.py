import numpy as np

from nclp.randomgen import trial_rng


def random_matrix(seed, dim):
    """Complex Gaussian matrix from its own stream."""
    g = trial_rng(seed, 99)
    return (g.standard_normal((dim, dim)) + 1j * g.standard_normal((dim, dim))) / np.sqrt(2)


def random_psd(seed, dim, shift=0.0):
    g = random_matrix(seed, dim)
    return g @ g.conj().T / dim + shift * np.eye(dim)


def failing_sample(trial, rng):
    """Stand-in sampler whose record always violates its bound."""
    from nclp.reports import make_report

    x = np.eye(trial.dim)
    report = make_report(trial.check_name, inputs=[x], lhs=2.0, rhs=1.0, tolerance=0.0,
                         seed=trial.seed, params=[float(v) for _, v in trial.point])
    return report, {"x": x}
