"""
Time-varying value distributions.

Every schedule answers "which distribution is in force on
``[t_next, t_next + h)``" and only ever changes at step boundaries, so the
integrator sees a constant distribution within each step. Randomness comes
from a ``numpy.random.Generator`` (PCG64 via ``default_rng``) owned by the
run and passed in on every call.
"""
import abc
import logging
import math

from .auction import ValueDistribution
from .common import ConfigError, Model, plain
from .util import pair

logger = logging.getLogger(__name__)


class Schedule(Model):
    """Interface for step-aligned sources of value distributions."""

    def __init__(self, config):
        super().__init__(config)
        self.h = None
        self.switches = 0

    def reset(self, h):
        """Start a new path on a grid of step size ``h``."""
        if not h > 0:
            raise ValueError('h must be positive, got %r' % (h,))
        self.h = h
        self.switches = 0
        self._reset()

    @abc.abstractmethod
    def _reset(self):
        raise NotImplementedError

    @abc.abstractmethod
    def at(self, rng, t_next) -> ValueDistribution:
        """Distribution in force on ``[t_next, t_next + h)``.

        Calls must come with nondecreasing ``t_next`` on the step grid.
        """
        raise NotImplementedError

    @property
    def states(self):
        """Declared states in presentation order, or ``None`` for
        continuous-state schedules."""
        return None

    def params(self):
        """Configuration as plain lists and numbers, for echoing."""
        return {k: plain(v) for k, v in self.config._asdict().items()
                if v is not None}

    def _step_index(self, t_next):
        if self.h is None:
            raise RuntimeError('schedule used before reset()')
        return int(round(t_next / self.h))


def _states(field, values):
    try:
        states = [ValueDistribution(*v) for v in values]
    except (TypeError, ValueError) as e:
        raise ConfigError(field, str(e))
    if not states:
        raise ConfigError(field, 'at least one state required')
    if len(set(states)) != len(states):
        raise ConfigError(field, 'states must be distinct')
    return states


def _stay_range(values):
    try:
        lo, hi = (float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError('stay_range', 'expected [lo, hi], got %r'
                          % (values,))
    if not 0 <= lo < hi:
        raise ConfigError('stay_range', 'need 0 <= lo < hi, got [%r, %r]'
                          % (lo, hi))
    return lo, hi


class FiniteStateSchedule(Schedule):
    """Piecewise-constant schedule over a finite set of states."""

    def __init__(self, config, states):
        super().__init__(config)
        self._states = states
        # presentation index -> rank by (v_m, v_M)
        self.order = sorted(range(len(states)),
                            key=lambda i: (states[i].v_m, states[i].v_M))
        self._index = None
        self._next_switch = None

    @property
    def states(self):
        return list(self._states)

    @property
    def sorted_states(self):
        return [self._states[i] for i in self.order]

    @property
    def strictly_ordered(self):
        """Whether minimum values are pairwise distinct."""
        mins = [d.v_m for d in self.sorted_states]
        return all(a < b for a, b in zip(mins, mins[1:]))

    def _reset(self):
        self._index = None
        self._next_switch = None

    def at(self, rng, t_next):
        k = self._step_index(t_next)
        if self._index is None:
            self._index = self._first()
            self._next_switch = k + self._dwell_steps(rng)
        while k >= self._next_switch:
            self._index = self._advance()
            self._next_switch += self._dwell_steps(rng)
            self.switches += 1
        return self._states[self._index]

    def _first(self):
        return 0

    def _advance(self):
        return (self._index + 1) % len(self._states)

    def _dwell_steps(self, rng):
        return math.inf

    def _round_up(self, dwell):
        return max(1, math.ceil(dwell / self.h - 1e-9))


class _RandomDwell(FiniteStateSchedule):

    def __init__(self, config, states):
        super().__init__(config, states)
        self.stay_range = _stay_range(config.stay_range)

    def _dwell_steps(self, rng):
        return self._round_up(rng.uniform(*self.stay_range))


class Constant(FiniteStateSchedule):
    """A single fixed distribution."""

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--state', type=pair, required=True,
                            help='v_m,v_M')

    def __init__(self, config):
        super().__init__(config, _states('state', [config.state]))


class TwoState(_RandomDwell):
    """Alternates between two states, with staying times drawn uniformly
    from ``stay_range``. Starts in the first listed state."""

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--states', type=pair, nargs=2, required=True,
                            help='two v_m,v_M pairs')
        parser.add_argument('--stay-range', type=float, nargs=2,
                            default=(0.0, 2.0),
                            help='bounds of the uniform staying time')

    def __init__(self, config):
        states = _states('states', config.states)
        if len(states) != 2:
            raise ConfigError('states', 'exactly 2 states required, got %d'
                              % len(states))
        super().__init__(config, states)
        if not self.strictly_ordered:
            raise ConfigError('states', 'minimum values must differ')


class Cyclic(_RandomDwell):
    """Visits ``cycle_order`` repeatedly, with staying times drawn
    uniformly from ``stay_range``."""

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--states', type=pair, nargs='+', required=True,
                            help='v_m,v_M pairs')
        parser.add_argument('--cycle-order', type=int, nargs='+',
                            help='state indices in visiting order '
                                 '(default: as listed)')
        parser.add_argument('--stay-range', type=float, nargs=2,
                            default=(0.0, 2.0),
                            help='bounds of the uniform staying time')

    def __init__(self, config):
        states = _states('states', config.states)
        super().__init__(config, states)
        order = config.cycle_order
        if order is None:
            order = range(len(states))
        self.cycle_order = [int(i) for i in order]
        if not self.cycle_order:
            raise ConfigError('cycle_order', 'must not be empty')
        if any(not 0 <= i < len(states) for i in self.cycle_order):
            raise ConfigError('cycle_order', 'indices must lie in [0, %d)'
                              % len(states))
        self._position = 0

    def _reset(self):
        super()._reset()
        self._position = 0

    def _first(self):
        self._position = 0
        return self.cycle_order[0]

    def _advance(self):
        self._position = (self._position + 1) % len(self.cycle_order)
        return self.cycle_order[self._position]


class Sequence(FiniteStateSchedule):
    """Visits ``sequence`` once with fixed ``durations``; the last state
    persists afterwards."""

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--states', type=pair, nargs='+', required=True,
                            help='v_m,v_M pairs')
        parser.add_argument('--sequence', type=int, nargs='+', required=True,
                            help='state indices in visiting order')
        parser.add_argument('--durations', type=float, nargs='+',
                            required=True, help='staying time of each visit')

    def __init__(self, config):
        states = _states('states', config.states)
        super().__init__(config, states)
        self.sequence = [int(i) for i in config.sequence]
        self.durations = [float(t) for t in config.durations]
        if not self.sequence:
            raise ConfigError('sequence', 'must not be empty')
        if any(not 0 <= i < len(states) for i in self.sequence):
            raise ConfigError('sequence', 'indices must lie in [0, %d)'
                              % len(states))
        if len(self.durations) != len(self.sequence):
            raise ConfigError('durations', 'need one duration per visit')
        if any(not t > 0 for t in self.durations):
            raise ConfigError('durations', 'must be positive')
        self._position = 0

    def _reset(self):
        super()._reset()
        self._position = 0

    def _first(self):
        self._position = 0
        return self.sequence[0]

    def _advance(self):
        self._position += 1
        return self.sequence[self._position]

    def _dwell_steps(self, rng):
        if self._position == len(self.sequence) - 1:
            return math.inf
        return self._round_up(self.durations[self._position])


class Langevin(Schedule):
    """Mean-reverting fluctuation of ``(v_m, v_M)`` driven by one shared
    standard-normal noise with intensities ``noise = (a_m, a_M)``.

    The Euler-Maruyama step is carried out on ``(v_m, v_M - v_m)``; with
    ``a_m == a_M`` and a start at ``v_bar`` the width never changes.
    """

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument('--v-bar', type=float, nargs=2,
                            default=(20.0, 40.0),
                            help='restoring targets of v_m and v_M')
        parser.add_argument('--noise', type=float, nargs=2, required=True,
                            help='noise intensities a_m, a_M')
        parser.add_argument('--initial', type=float, nargs=2,
                            help='starting v_m, v_M (default: v_bar)')

    def __init__(self, config):
        super().__init__(config)
        try:
            self.target = ValueDistribution(*config.v_bar)
        except (TypeError, ValueError) as e:
            raise ConfigError('v_bar', str(e))
        try:
            self.a_m, self.a_M = (float(a) for a in config.noise)
        except (TypeError, ValueError):
            raise ConfigError('noise', 'expected [a_m, a_M], got %r'
                              % (config.noise,))
        if self.a_m < 0 or self.a_M < 0:
            raise ConfigError('noise', 'intensities must be non-negative')
        initial = config.initial
        if initial is None:
            initial = config.v_bar
        try:
            self.initial = ValueDistribution(*initial)
        except (TypeError, ValueError) as e:
            raise ConfigError('initial', str(e))
        self.width_min = 1e-3 * self.target.width
        self.guard_triggers = 0
        self._reset()

    def _reset(self):
        self.state = self.initial
        self._width = self.initial.width
        self._k = 0
        self.guard_triggers = 0

    def step(self, rng, h):
        """Advance one Euler-Maruyama step of size ``h``."""
        if not h > 0:
            raise ValueError('h must be positive, got %r' % (h,))
        z = rng.standard_normal()
        sq = math.sqrt(h)
        v_m = self.state.v_m
        width = self._width
        v_m = v_m - (v_m - self.target.v_m) * h + self.a_m * sq * z
        width = (width - (width - self.target.width) * h
                 + (self.a_M - self.a_m) * sq * z)
        if width < self.width_min:
            self.guard_triggers += 1
            logger.warning('width %.6g below guard %.6g at step %d, clamped',
                           width, self.width_min, self._k)
            width = self.width_min
        self._width = width
        self.state = ValueDistribution(v_m, v_m + width)
        return self.state

    def at(self, rng, t_next):
        k = self._step_index(t_next)
        while self._k < k:
            self.step(rng, self.h)
            self._k += 1
        return self.state


def schedule_at(schedule: Schedule, rng, t_next):
    """Distribution in force on ``[t_next, t_next + h)``."""
    return schedule.at(rng, t_next)


def langevin_step(schedule: Langevin, rng, h):
    return schedule.step(rng, h)
