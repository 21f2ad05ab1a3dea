import argparse

import pytest

import tvauction.util


def test_colored():
    # test colored output w/o bold font
    assert tvauction.util.colored('hello') == 'hello'
    assert tvauction.util.colored('hello', 'r') == \
        '\x1b[31mhello\x1b[0m'
    assert tvauction.util.colored('hello', 'r', 'b', style='b') == \
        '\x1b[1;31;44mhello\x1b[0m'
    assert tvauction.util.colored('hello', 'r', style='b') == \
        '\x1b[1;31mhello\x1b[0m'


def test_pair():
    assert tvauction.util.pair('10,20') == [10.0, 20.0]
    assert tvauction.util.pair('-1.5,2e1') == [-1.5, 20.0]
    for bad in ('10', '1,2,3', 'a,b'):
        with pytest.raises(argparse.ArgumentTypeError):
            tvauction.util.pair(bad)
