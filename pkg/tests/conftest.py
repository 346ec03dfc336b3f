"""Shared fixtures and the acceptance-criteria summary printed at the end of a run."""

from __future__ import annotations

from collections import OrderedDict

# criterion number -> list of (check name, passed, detail); filled by test_acceptance
ACCEPTANCE: "OrderedDict[int, list[tuple[str, bool, str]]]" = OrderedDict()

TITLES = {
    1: "cluster chain N=12",
    2: "toric code",
    3: "antipodal toric code N=10",
    4: "PXP identity",
    5: "product state N=12",
    6: "Bell families N=12",
    7: "cluster families",
    8: "property suites",
}


def record(criterion: int, name: str, ok: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(ok), detail))
    print(f"criterion {criterion} [{name}]: {'PASS' if ok else 'FAIL'} {detail}")
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[k]
        ok = all(c[1] for c in checks)
        failed = [c[0] for c in checks if not c[1]]
        note = f" (failing: {', '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {k} {TITLES.get(k, '')}: {'PASS' if ok else 'FAIL'} "
                      f"[{sum(c[1] for c in checks)}/{len(checks)} checks]{note}")
        for name, passed, detail in checks:
            tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}: {detail}")
