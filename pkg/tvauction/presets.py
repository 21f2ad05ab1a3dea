"""Named experiments as flat run configurations."""
from .common import ConfigError, RunConfig

_RUN = {'n': 10, 'eta': 2000.0, 'h': 0.001, 'T': 2000.0, 'seed': 1,
        'record_every': 100}


def _two_state(low, high):
    return dict(_RUN, schedule='TwoState', states=[low, high],
                stay_range=[0.0, 2.0])


def _langevin(a_m, a_M):
    return dict(_RUN, schedule='Langevin', v_bar=[20.0, 40.0],
                noise=[a_m, a_M])


_CYCLE_STATES = [[10.0, 20.0], [10.0, 30.0], [20.0, 30.0], [20.0, 40.0]]


def _cyclic(order):
    return dict(_RUN, schedule='Cyclic', states=_CYCLE_STATES,
                cycle_order=order, stay_range=[0.0, 2.0])


PRESETS = {
    # width grows with v_m
    'fig2a': _two_state([10.0, 20.0], [20.0, 40.0]),
    # same width
    'fig2b': _two_state([10.0, 20.0], [20.0, 30.0]),
    # width shrinks with v_m
    'fig2c': _two_state([10.0, 30.0], [20.0, 30.0]),
    'fig3a': _langevin(5.0, 10.0),
    'fig3b': _langevin(5.0, 5.0),
    'fig3c': _langevin(5.0, 0.0),
    'figA1a': _cyclic([0, 1, 3, 2]),
    'figA1b': _cyclic([0, 2, 3, 1]),
}


def preset_config(name, output_dir=None):
    """Validated run configuration of a named experiment.

    Raises:
        ConfigError: unknown preset
    """
    if name not in PRESETS:
        raise ConfigError('preset', 'unknown preset %r, choose from %s'
                          % (name, ', '.join(PRESETS)))
    return RunConfig.from_flat(PRESETS[name], mode='PRESET', preset=name,
                               output_dir=output_dir)
