import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion after the run."""
    results = {}
    for status, failed in (("passed", False), ("failed", True), ("error", True)):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", "call") != "call":
                continue
            match = re.search(r"test_acceptance\.py::test_c(\d+)_(\w+?)(?:\[|$)", rep.nodeid)
            if not match:
                continue
            num = int(match.group(1))
            name = match.group(2).replace("_", " ")
            was_failed = results.get(num, (False, name))[0]
            results[num] = (was_failed or failed, name)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            failed, name = results[num]
            tag = "FAIL" if failed else "PASS"
            terminalreporter.write_line(f"{tag}  criterion {num:2d}: {name}")
