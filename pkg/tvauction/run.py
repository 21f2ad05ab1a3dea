"""
Main program parsing arguments and running commands.
"""
import argparse
import inspect as ins
import logging
import sys

from . import command
from . import common
from . import util


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        # customize error message
        self.print_usage(sys.stderr)
        err = util.colored('error:', 'r', style='b')
        self.exit(2, '%s %s\n' % (err, message))


_parser_formatter = argparse.ArgumentDefaultsHelpFormatter
main_parser = _ArgumentParser(formatter_class=_parser_formatter,
                              prog='python -m tvauction.run')
main_parser.add_argument('-w', '--workspace', '--out', dest='workspace',
                         help='workspace dir (default: $TVAUCTION_OUT or '
                              'ws/default)')
main_parser.add_argument('-q', action='store_true', help='quiet')
main_parser.add_argument('-v', action='store_true', help='verbose')
_subparsers = main_parser.add_subparsers(title='supported commands',
                                         dest='command',
                                         parser_class=_ArgumentParser)
_subparsers.required = True
_subparser_map = {}

_commands = {m[0].lower(): m[1]
             for m in ins.getmembers(command,
                                     util.sub_class_checker(common.Command))}

for _cmd in _commands:
    _sub = _subparsers.add_parser(_cmd,
                                  formatter_class=_parser_formatter)
    _subparser_map[_cmd] = _sub
    _sub.set_defaults(func=_commands[_cmd](_sub)._run)


_global_options = {'-w', '--workspace', '--out'}
_global_flags = {'-q', '-v'}
_flag_commands = {'--preset': ['preset'],
                  '--config': ['run', '--config'],
                  '--validate': ['validate']}


def command_argv(argv):
    """Rewrite ``--preset NAME``, ``--config PATH`` and ``--validate`` into
    the ``preset``, ``run --config`` and ``validate`` commands."""
    argv = list(argv)
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _global_options:
            i += 2
            continue
        if arg in _global_flags or arg.split('=', 1)[0] in _global_options:
            i += 1
            continue
        flag, eq, value = arg.partition('=')
        if flag in _flag_commands:
            argv[i:i + 1] = _flag_commands[flag] + ([value] if eq else [])
        break
    return argv


def _error(message):
    err = util.colored('error:', 'r', style='b')
    print('%s %s' % (err, message), file=sys.stderr)


def main(args):
    """Run the selected command.

    Returns:
        int: exit status, 0 on success, 1 on failed checks or unexpected
        errors, 2 on usage and configuration errors
    """
    logger = logging.getLogger(args.command)
    try:
        return args.func(args) or 0
    except KeyboardInterrupt:  # pragma: no cover
        # print traceback info to screen only
        import traceback
        sys.stderr.write(traceback.format_exc())
        logger.warning('cancelled by user')
        return 1
    except common.NotConfiguredError as e:
        _error(e)
        _subparser_map['config'].print_usage(sys.stderr)
        return 2
    except (common.ConfigError, common.ParseError) as e:
        _error(e)
        return 2
    except OSError as e:
        _error(e)
        return 2
    except Exception as e:  # pragma: no cover
        # print traceback info to screen only
        import traceback
        sys.stderr.write(traceback.format_exc())
        logger.error('exception occurred: %s', e)
        return 1


def configure_logging(quiet=False, verbose=False):
    """Attach a colored console handler to the root logger."""
    _logger = logging.getLogger()
    if quiet:
        _logger.setLevel(logging.WARNING)
    elif verbose:
        _logger.setLevel(logging.DEBUG)
    else:
        _logger.setLevel(logging.INFO)

    class _ColoredFormatter(logging.Formatter):
        _LOG_COLORS = {
            'WARNING': 'y',
            'INFO': 'g',
            'DEBUG': 'b',
            'CRITICAL': 'y',
            'ERROR': 'r'
        }

        def format(self, record):
            levelname = record.levelname
            if levelname in self._LOG_COLORS:
                record.levelname = util.colored(
                    record.levelname[0], self._LOG_COLORS[record.levelname])
            return logging.Formatter.format(self, record)

    logFormatter = _ColoredFormatter(
        '%(levelname)s [%(name)s] %(asctime)s %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    consoleHandler = logging.StreamHandler()
    consoleHandler.setFormatter(logFormatter)
    _logger.addHandler(consoleHandler)


if __name__ == '__main__':
    _args = main_parser.parse_args(command_argv(sys.argv[1:]))
    configure_logging(_args.q, _args.v)

    # remove logging related options
    del _args.q
    del _args.v

    sys.exit(main(_args))
