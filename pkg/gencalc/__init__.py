"""
gencalc.

Generalized derivatives D_p f(t) = lim [f(p(t, h)) - f(t)] / h, the
Sturm-Liouville problems and mechanics they induce, and a command line that
runs them and verifies the results against known answers.
"""
__version__ = "1.0.0"


def get_runner():
    """
    Get the command-line runner.

    Returns:
        gencalc.main.run
    """
    from gencalc.main import run

    return run
