from __future__ import annotations

import pytest

from xmluplift.engine import Plan
from xmluplift.legal import bundled_taxonomy, generate_corpus, reference_mapping, serialize_document


@pytest.fixture(scope="session")
def plan() -> Plan:
    return Plan(reference_mapping())


@pytest.fixture(scope="session")
def taxonomy():
    return bundled_taxonomy()


@pytest.fixture(scope="session")
def small_corpus_xml(taxonomy) -> list[str]:
    return [serialize_document(d) for d in generate_corpus(7, 25, taxonomy)]


# -- acceptance reporting ----------------------------------------------------
# Tests marked ``acceptance(n, title)`` are grouped by criterion number; the
# terminal summary prints one PASS/FAIL line per criterion.

_criteria: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "failed": [], "ran": 0, "notes": []})
    if report.when == "call":
        entry["ran"] += 1
        entry["notes"].extend(v for k, v in item.user_properties if k == "detail")
    if report.failed or (report.when == "call" and report.skipped):
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "FAIL" if e["failed"] or not e["ran"] else "PASS"
        line = f"criterion {number}: {status}  {e['title']} ({e['ran']} checks)"
        if e["notes"]:
            line += "  [" + "; ".join(e["notes"]) + "]"
        if e["failed"]:
            line += "  failed: " + ", ".join(e["failed"])
        terminalreporter.write_line(line)
