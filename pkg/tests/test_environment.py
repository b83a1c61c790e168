import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import check_environment  # noqa: E402


@pytest.mark.parametrize("check", check_environment.CHECKS, ids=lambda check: check.__name__)
def test_environment_check_passes(check, capsys):
    assert check()
    assert "✅" in capsys.readouterr().out


def test_main_reports_no_failures(capsys):
    assert check_environment.main() == 0
    assert "Environment ready" in capsys.readouterr().out


def test_main_counts_failures(monkeypatch, capsys):
    checks = [lambda: False, check_environment.check_settings]
    monkeypatch.setattr(check_environment, "CHECKS", checks)
    assert check_environment.main() == 1
    assert "1 check(s) failed" in capsys.readouterr().out
