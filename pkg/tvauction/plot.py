"""SVG line plots of a simulation trace."""
import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402

from .engine import SimulationTrace  # noqa: E402


def plot_trace(trace: SimulationTrace, path):
    """Plot x against the support and the cumulative average payoffs.

    Output is reproducible: element ids are salted with a constant and no
    date is embedded.
    """
    f = trace.frame
    with matplotlib.rc_context({'svg.hashsalt': 'tvauction',
                                'svg.fonttype': 'none'}):
        fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
        top, bottom = axes
        top.plot(f['t'], f['x'], label='x', linewidth=0.8)
        top.plot(f['t'], f['v_m'], label='v_m', linewidth=0.8)
        top.plot(f['t'], f['v_M'], label='v_M', linewidth=0.8)
        top.set_ylabel('value')
        top.legend(loc='upper right')
        bottom.plot(f['t'], f['cum_avg_dagger'], label='first-price',
                    linewidth=0.8)
        bottom.plot(f['t'], f['cum_avg_star'], label='second-price',
                    linewidth=0.8)
        bottom.set_xlabel('t')
        bottom.set_ylabel('time-average payoff')
        bottom.legend(loc='upper right')
        fig.tight_layout()
        fig.savefig(str(path), format='svg', metadata={'Date': None})
        plt.close(fig)
