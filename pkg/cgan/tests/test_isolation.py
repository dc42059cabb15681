"""The trainer must touch the simulation toolchain only through files."""

import pathlib

import boilcgan


def test_no_simulation_package_imports():
    root = pathlib.Path(boilcgan.__file__).parent
    sources = list(root.glob("*.py"))
    assert sources
    for src in sources:
        assert "boilgen" not in src.read_text(), src
