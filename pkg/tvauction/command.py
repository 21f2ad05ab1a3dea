"""Define commands."""
import argparse
import shutil
import sys

from . import common
from . import engine
from . import presets
from . import validation


def _add_run_arguments(parser, batch=True):
    """Run-level overrides shared by the commands that run simulations."""
    group = parser.add_argument_group('run')
    group.add_argument('--n', type=int, help='number of bidders')
    group.add_argument('--rate', dest='eta', type=float,
                       help='learning rate eta')
    group.add_argument('--step', dest='h', type=float,
                       help='integration step h')
    group.add_argument('--T', dest='T', type=float, help='horizon')
    group.add_argument('--seed', type=int, help='random seed')
    group.add_argument('--record-every', type=int,
                       help='record one trace row every this many steps')
    if batch:
        group.add_argument('--batch', type=int, default=1,
                           help='run seeds seed, ..., seed+K-1 in parallel')
        group.add_argument('--svg', action='store_true',
                           help='also plot each trace as SVG')


def _overrides(args):
    return {key: getattr(args, key) for key in common.RunConfig.RUN_KEYS}


def _execute(ws, config, args, logger, label):
    """Run ``config`` for ``args.batch`` consecutive seeds and write the
    outputs keyed by seed."""
    if args.batch < 1:
        raise common.ConfigError('batch', 'must be at least 1')
    seeds = [config.seed + i for i in range(args.batch)]
    logger.info('[%s] running %s %s for seeds %s', ws, label,
                config.schedule, seeds)
    results = engine.run_batch(config, seeds)
    for seed, (trace, summary, params) in zip(seeds, results):
        out = ws.run_path(seed)
        engine.write_trace(out / 'trace.csv', trace)
        engine.write_summary(out / 'summary.toml', summary, params)
        if args.svg:
            from . import plot
            plot.plot_trace(trace, out / 'trace.svg')
        logger.info('[%s] seed=%d gap=%.6g path_rate=%.6g verdict=%s',
                    ws, seed, summary.gap, summary.path_rate,
                    summary.verdict.name)
        print('%s seed=%d gap=%r verdict=%s'
              % (label, seed, summary.gap, summary.verdict.name))
    return 0


class Preset(common.Command):
    """Command ``preset``.

    Run a named experiment; its configuration is written to the workspace
    first.

    Example:
        .. code-block:: bash

            $ python -m tvauction.run -w ws/fig2a preset fig2a --T 500
            fig2a seed=1 gap=... verdict=FIRST_HIGHER
    """

    def __init__(self, parser):
        super().__init__(parser)
        parser.add_argument('name', choices=sorted(presets.PRESETS),
                            help='experiment to run')
        _add_run_arguments(parser)

    def run(self, ws, args):
        logger = ws.logger('preset')
        config = presets.preset_config(args.name, str(ws))
        config = config.replace_flat(**_overrides(args))
        ws.configure(config)
        return _execute(ws, config, args, logger, args.name)


class Config(common.Command):
    """Command ``config``.

    Configure a schedule and the run parameters for a workspace.

    Example:
        .. code-block:: bash

            $ python -m tvauction.run -w ws/test config Constant --state 10,20
            In [ws/test]: configured Constant with {'state': [10.0, 20.0]}
    """

    def __init__(self, parser):
        super().__init__(parser)
        subs = parser.add_subparsers(title='schedules available',
                                     dest='schedule')
        subs.required = True
        self._options = {}
        for name, schedule in sorted(common.schedule_classes().items()):
            _parser_formatter = argparse.ArgumentDefaultsHelpFormatter
            summary = (schedule.__doc__ or '').strip().split('\n')[0]
            sub = subs.add_parser(name, formatter_class=_parser_formatter,
                                  help=summary)
            group = sub.add_argument_group('config')
            schedule.add_arguments(group)
            self._options[name] = [a.dest for a in group._group_actions]
            _add_run_arguments(sub, batch=False)

    def run(self, ws, args):
        params = {}
        for key in self._options[args.schedule]:
            value = getattr(args, key)
            if value is not None:
                params[key] = common.plain(value)
        flat = {k: v for k, v in _overrides(args).items() if v is not None}
        flat['schedule'] = args.schedule
        flat.update(params)
        config = common.RunConfig.from_flat(flat, output_dir=str(ws))
        ws.configure(config)
        ws.logger('config').info('[%s] configured %s', ws, config)
        print('In [%s]: configured %s with %s' % (ws, args.schedule, params),
              file=sys.stderr)
        return 0


class Run(common.Command):
    """Command ``run``.

    Run a configuration file, or the workspace configuration when no file
    is given.
    """

    def __init__(self, parser):
        super().__init__(parser)
        parser.add_argument('--config', dest='config_path',
                            help='flat TOML run configuration')
        _add_run_arguments(parser)

    def run(self, ws, args):
        logger = ws.logger('run')
        if args.config_path is None:
            config = ws.config
        else:
            config = common.load_run_config(args.config_path,
                                            output_dir=str(ws))
        config = config.replace_flat(**_overrides(args))
        if args.config_path is not None:
            ws.configure(config)
        return _execute(ws, config, args, logger, config.preset or 'custom')


class Validate(common.Command):
    """Command ``validate``.

    Run the cross-check battery and print a pass/fail table; exits with 1
    when any check fails.
    """

    def __init__(self, parser):
        super().__init__(parser)
        parser.add_argument('--samples', type=int, default=10 ** 6,
                            help='auctions per Monte-Carlo estimate')
        parser.add_argument('--seed', type=int, default=1,
                            help='random seed')
        parser.add_argument('--workers', type=int,
                            help='threads per estimate')
        parser.add_argument('--wrong-alpha', action='store_true',
                            help='bid with slope (n-2)/n in first-price '
                                 'auctions; the equivalence checks must fail')

    def run(self, ws, args):
        logger = ws.logger('validate')
        if args.samples < 10 ** 4:
            raise common.ConfigError('samples', 'at least 10000 required')
        bid_slope = None
        if args.wrong_alpha:
            def bid_slope(n):
                return (n - 2) / n
        checks = validation.run_battery(args.samples, args.seed, bid_slope,
                                        args.workers)
        print(validation.format_table(checks, color=sys.stdout.isatty()))
        failed = [c.name for c in checks if not c.passed]
        logger.info('[%s] samples=%d seed=%d: %d/%d checks passed', ws,
                    args.samples, args.seed, len(checks) - len(failed),
                    len(checks))
        return 1 if failed else 0


class Clean(common.Command):
    """Command ``clean``.

    Remove all results in specific workspace. If ``--all`` is specified,
    clean the entire workspace
    """

    def __init__(self, parser):
        super().__init__(parser)
        parser.add_argument('--all', action='store_true',
                            help='clean the entire workspace')

    def run(self, ws, args):
        if args.all:
            shutil.rmtree(str(ws))
        else:
            shutil.rmtree(str(ws.result_path))
        return 0
