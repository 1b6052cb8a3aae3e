"""One test per acceptance criterion; each prints its pass/fail line.

The lines are also collected into a section of the pytest terminal summary.
"""

import pytest

from maassperiods import acceptance

RESULTS: list = []


@pytest.fixture(scope="module")
def ctx():
    return acceptance.Context(profile="strict")


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda c: f"{c.number}-{c.title.replace(' ', '_')}")
def test_criterion(ctx, criterion):
    r = criterion(ctx)
    RESULTS.append(r)
    print(r.line())
    assert r.passed, r.detail


def test_suite_wall_time():
    total = sum(r.seconds for r in RESULTS)
    print(f"acceptance wall time {total:.1f}s")
    assert len(RESULTS) == len(acceptance.CRITERIA)
    assert total <= 900


def test_verify_command_exits_zero(tmp_path, monkeypatch, capsys):
    from maassperiods import maass
    from maassperiods.cli import main

    monkeypatch.setenv(maass.CACHE_ENV, str(tmp_path / "cache"))
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == len(acceptance.CRITERIA)
