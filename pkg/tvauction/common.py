import abc
import argparse
import logging
import numbers
import os
import pathlib
from collections import namedtuple
from operator import itemgetter

import toml


class NotConfiguredError(Exception):
    pass


class ParseError(Exception):
    """Malformed command line or configuration file.

    Attributes:
        lineno (int): offending line of a configuration file, if known
    """

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = 'line %d: %s' % (lineno, message)
        super().__init__(message)
        self.lineno = lineno


class ConfigError(ValueError):
    """A configuration value violates an invariant.

    Attributes:
        field (str): name of the offending configuration key
    """

    def __init__(self, field, message):
        super().__init__('%s: %s' % (field, message))
        self.field = field


class Model(abc.ABC):
    """Interface for configurable components.

    Each model class should have an ``add_arguments`` class method to define
    its parameters along with their types, default values, etc. The same
    parameters are the keys of the flat configuration file.
    """

    @classmethod
    @abc.abstractmethod
    def add_arguments(cls, parser: argparse.ArgumentParser):
        """Add arguments to an argparse subparser."""
        raise NotImplementedError

    @classmethod
    def declared(cls):
        """Parameters declared by :meth:`add_arguments`.

        Returns:
            (defaults, required): default value per parameter, and the set
            of parameters that must be given
        """
        parser = argparse.ArgumentParser(prog='', add_help=False)
        cls.add_arguments(parser)
        actions = [a for a in parser._actions
                   if a.default is not argparse.SUPPRESS]
        return ({a.dest: a.default for a in actions},
                {a.dest for a in actions if a.required})

    @classmethod
    def build(cls, **kwargs):
        """Build model. Parameters are specified by keyword arguments;
        missing parameters take their declared defaults.

        Example:
            >>> from tvauction.environments import Constant
            >>> model = Constant.build(state=[10, 20])
            >>> print(model.config)
            Constant(state=[10, 20])

        Raises:
            ConfigError: unknown key, missing required key, or a value
                violating the model's invariants
        """
        params, required = cls.declared()
        for key, value in kwargs.items():
            if key not in params:
                raise ConfigError(key, 'unknown parameter for %s'
                                  % cls.__name__)
            params[key] = value
        for key in sorted(required):
            if params[key] is None:
                raise ConfigError(key, 'required parameter of %s is missing'
                                  % cls.__name__)
        keys, values = zip(*sorted(params.items(), key=itemgetter(0)))
        config = namedtuple(cls.__name__, keys)(*values)
        return cls(config)

    @classmethod
    def parse(cls, args):
        """Parse command-line options and build model."""

        class _ArgumentParser(argparse.ArgumentParser):
            def error(self, message):
                raise ParseError(message)

        parser = _ArgumentParser(prog='', add_help=False)
        cls.add_arguments(parser)
        args = parser.parse_args(args)
        return cls.build(**dict(args._get_kwargs()))

    def __init__(self, config):
        """
        Args:
            config (namedtuple): model configuration
        """
        self.config = config

    def __str__(self):
        return str(self.config)


def schedule_classes():
    """Concrete schedule classes by name."""
    from . import environments as env
    from . import util
    import inspect as ins
    return dict(ins.getmembers(env, util.sub_class_checker(env.Schedule)))


def plain(value):
    """Tuples and nested lists as plain lists, as written to TOML."""
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


class RunConfig(namedtuple('RunConfig', [
        'mode', 'preset', 'n', 'eta', 'h', 'T', 'seed', 'record_every',
        'schedule', 'schedule_params', 'output_dir'])):
    """Everything needed to reproduce one simulation run."""

    __slots__ = ()

    RUN_KEYS = {
        'n': (int, 10),
        'eta': (float, 2e3),
        'h': (float, 1e-3),
        'T': (float, 2000.0),
        'seed': (int, 1),
        'record_every': (int, 100),
    }

    @classmethod
    def from_flat(cls, flat, mode='CUSTOM', preset=None, output_dir=None):
        """Validate a flat key-value mapping and build a run config.

        Raises:
            ConfigError: naming the first offending key
        """
        flat = dict(flat)
        run = {}
        for key, (kind, default) in cls.RUN_KEYS.items():
            value = flat.pop(key, default)
            run[key] = _coerce(key, value, kind)
        if run['n'] < 2:
            raise ConfigError('n', 'at least 2 bidders required')
        for key in ('eta', 'h', 'T'):
            if not run[key] > 0:
                raise ConfigError(key, 'must be positive')
        steps = round(run['T'] / run['h'])
        if steps < 1 or abs(steps * run['h'] - run['T']) > 1e-9 * run['T']:
            raise ConfigError('T', 'must be a positive multiple of h=%r'
                              % run['h'])
        if run['seed'] < 0:
            raise ConfigError('seed', 'must be non-negative')
        if run['record_every'] < 1:
            raise ConfigError('record_every', 'must be at least 1')

        name = flat.pop('schedule', None)
        classes = schedule_classes()
        if name is None:
            raise ConfigError('schedule', 'required')
        if name not in classes:
            raise ConfigError('schedule', 'unknown schedule %r, choose from '
                              '%s' % (name, ', '.join(sorted(classes))))
        config = cls(mode=mode, preset=preset, schedule=name,
                     schedule_params=flat, output_dir=output_dir, **run)
        # fail early on bad schedule parameters
        config.build_schedule()
        return config

    def build_schedule(self):
        return schedule_classes()[self.schedule].build(
            **self.schedule_params)

    def replace_flat(self, **overrides):
        """Return a validated copy with the given flat keys replaced;
        ``None`` values are ignored."""
        flat = self.to_flat()
        flat.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_flat(flat, self.mode, self.preset,
                                   self.output_dir)

    def to_flat(self):
        flat = {key: getattr(self, key) for key in self.RUN_KEYS}
        flat['schedule'] = self.schedule
        flat.update(self.schedule_params)
        return flat

    @property
    def steps(self):
        return round(self.T / self.h)


def _coerce(key, value, kind):
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(key, 'expected an integer, got %r' % (value,))
        return int(value)
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(key, 'expected a number, got %r' % (value,))
    return float(value)


def load_run_config(path, mode='CUSTOM', preset=None, output_dir=None):
    """Load a flat TOML run configuration file.

    Raises:
        ParseError: the file is not valid TOML or is not flat
        ConfigError: a value violates an invariant
    """
    try:
        with open(str(path)) as f:
            flat = toml.load(f)
    except toml.TomlDecodeError as e:
        raise ParseError(e.msg, e.lineno)
    for key, value in flat.items():
        if isinstance(value, dict):
            raise ParseError('nested table [%s] not supported, use flat '
                             '"key = value" lines' % key)
    return RunConfig.from_flat(flat, mode, preset, output_dir)


def dump_run_config(config: RunConfig, path):
    with open(str(path), 'w') as f:
        toml.dump(config.to_flat(), f)


class Workspace:
    """Workspace utilities. One can save/load run configurations, open
    result directories, and get loggers, using workspace objects."""

    def __init__(self, path=None):
        if path is None:
            path = default_workspace()
        self._path = pathlib.Path(path)
        self._log_path = self._path / 'log'
        self._result_path = self._path / 'result'
        self._config = None

    def __str__(self):
        return str(self.path)

    def __repr__(self):
        return 'Workspace(path=' + str(self.path) + ')'

    @property
    def path(self):
        if not self._path.exists():
            self._path.mkdir(parents=True)
        return self._path

    @property
    def result_path(self):
        if not self._result_path.exists():
            self._result_path.mkdir(parents=True)
        return self._result_path

    @property
    def log_path(self):
        if not self._log_path.exists():
            self._log_path.mkdir(parents=True)
        return self._log_path

    @property
    def config_path(self):
        return self.path / 'config.toml'

    def run_path(self, seed):
        """Output directory of the run with the given seed."""
        p = self.result_path / ('seed-%d' % seed)
        if not p.exists():
            p.mkdir(parents=True)
        return p

    @property
    def config(self) -> RunConfig:
        if self._config is not None:
            return self._config
        self._load()
        return self._config

    def configure(self, config: RunConfig):
        """Save a run configuration into this workspace."""
        self._config = config._replace(output_dir=str(self._path))
        dump_run_config(self._config, self.config_path)

    def logger(self, name: str):
        """Get a logger that logs to a file in this workspace.

        Loggers are shared by name, but the file handler follows the most
        recent workspace asking for it.

        Args:
            name(str): logger name
        """
        logger = logging.getLogger(name)
        filename = os.path.abspath(str(self.log_path / (name + '.log')))
        for handler in list(logger.handlers):
            if not isinstance(handler, logging.FileHandler):
                continue
            if handler.baseFilename == filename:
                return logger
            logger.removeHandler(handler)
            handler.close()
        fileFormatter = logging.Formatter('%(levelname)s [%(name)s] '
                                          '%(asctime)s %(message)s',
                                          datefmt='%Y-%m-%d %H:%M:%S')
        fileHandler = logging.FileHandler(filename)
        fileHandler.setFormatter(fileFormatter)
        logger.addHandler(fileHandler)
        return logger

    def _load(self):
        """Load configuration."""
        if not self.config_path.exists():
            raise NotConfiguredError('config.toml doesn\'t exist in %s'
                                     % self._path)
        self._config = load_run_config(self.config_path,
                                       output_dir=str(self._path))


def default_workspace():
    return os.environ.get('TVAUCTION_OUT', 'ws/default')


class Command(abc.ABC):
    """Command interface."""

    def __init__(self, parser):
        self.parser = parser

    def _run(self, args):
        ws = Workspace(args.workspace)
        cmd = args.command
        del args.command, args.func, args.workspace
        args = {name: value for (name, value) in args._get_kwargs()}
        args = namedtuple(cmd.capitalize(), args.keys())(*args.values())
        return self.run(ws, args)

    @abc.abstractmethod
    def run(self, ws, args):
        raise NotImplementedError
