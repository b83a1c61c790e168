import pytest

from transmute.validation import (
    EXP_EIGENVALUES,
    GOURSAT_BOUNDS,
    GOURSAT_KERNEL_ERRORS,
    TAYLOR_FLOOR_ORDER,
    TAYLOR_KERNEL_ERRORS,
    check_coefficients,
    check_derivatives,
    check_eigen,
    check_kernel_goursat,
    check_kernel_taylor,
    check_partitions,
    check_s_table,
    eigen_items,
    run_validation,
    summarize,
)


def _failures(items):
    return [item for item in items if not item.passed]


def test_s_table_suite():
    items = check_s_table(direct_levels=8)
    assert not _failures(items)
    assert len(items) == 29 + 8


def test_partitions_suite():
    assert not _failures(check_partitions(15))


def test_derivative_suite():
    assert not _failures(check_derivatives())


def test_coefficient_suite():
    assert not _failures(check_coefficients())


def test_report(capsys):
    report = run_validation(["s-table", "partitions"])
    assert report.passed
    assert set(report.seconds) == {"s-table", "partitions"}
    payload = report.to_json()
    assert "seconds" not in payload
    assert payload["failed"] == 0
    assert summarize(report).endswith(f"{payload['total']}/{payload['total']} checks passed")


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_validation(["bogus"])


@pytest.mark.slow
def test_taylor_kernel_suite():
    assert not _failures(check_kernel_taylor())


@pytest.mark.slow
def test_goursat_kernel_suite():
    assert not _failures(check_kernel_goursat())


@pytest.mark.slow
def test_eigen_suite():
    assert not _failures(check_eigen())


def test_kernel_tables_cover_every_published_row():
    assert [len(rows) for rows in TAYLOR_KERNEL_ERRORS.values()] == [10, 10, 10, 15]
    assert sorted(TAYLOR_KERNEL_ERRORS[("cosh", 2.0)]) == list(range(1, 30, 2))
    assert sum(len(rows) for rows in GOURSAT_KERNEL_ERRORS.values()) == 13
    for (name, b, N), bound in GOURSAT_BOUNDS.items():
        assert GOURSAT_KERNEL_ERRORS[(name, b)][N] < bound


def test_taylor_rows_decrease_until_the_floor():
    for key, rows in TAYLOR_KERNEL_ERRORS.items():
        floor_order = TAYLOR_FLOOR_ORDER.get(key, max(rows) + 1)
        leading = [error for N, error in sorted(rows.items()) if N < floor_order]
        assert leading == sorted(leading, reverse=True)


def test_eigen_items_check_absolute_and_relative_errors():
    exact = dict(EXP_EIGENVALUES)
    items = eigen_items(exact, 1000)
    assert not _failures(items)
    assert len(items) == len(EXP_EIGENVALUES) + 4
    relative = [item.name for item in items if item.name.endswith("relative")]
    assert relative == [f"omega_{n}^2 relative" for n in (100, 200, 500, 1000)]

    shifted = dict(exact)
    shifted[5] += 2e-9
    shifted[200] += 1e-8
    failed = {item.name for item in _failures(eigen_items(shifted, 1000))}
    assert failed == {"omega_5^2", "omega_200^2"}


def test_eigen_items_tolerate_the_last_tabulated_digit():
    computed = dict(EXP_EIGENVALUES)
    computed[1000] += 5e-9
    assert not _failures(eigen_items(computed, 1000))
    computed[1000] += 2e-9
    assert [item.name for item in _failures(eigen_items(computed, 1000))] == ["omega_1000^2"]


def test_missing_eigenvalue_fails():
    items = eigen_items({1: EXP_EIGENVALUES[1]}, 2)
    assert [item.passed for item in items] == [True, False]
