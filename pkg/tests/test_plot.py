import py

from tvauction import engine
from tvauction.plot import plot_trace
from tvauction.presets import preset_config


def test_plot_trace(tmpdir: py.path.local):
    trace, _, _ = engine.run_config(preset_config('fig2a').replace_flat(T=2.0))
    a = tmpdir.join('a.svg')
    b = tmpdir.join('b.svg')
    plot_trace(trace, str(a))
    plot_trace(trace, str(b))
    content = a.read_binary()
    assert content.startswith(b'<?xml')
    assert b'<svg' in content
    assert content == b.read_binary()
