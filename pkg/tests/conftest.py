import re


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    seen = {int(m.group(1)) for m in (re.search(r"criterion\s+(\d+)", l) for l in test_acceptance.LINES) if m}
    lines = list(test_acceptance.LINES)
    for rep in terminalreporter.stats.get("failed", []):
        m = re.search(r"test_criterion_(\d+)", rep.nodeid)
        if m and int(m.group(1)) not in seen:
            lines.append(f"FAIL criterion {int(m.group(1)):>2}: raised before reporting (see failure above)")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(re.search(r"criterion\s+(\d+)", l).group(1))):
            terminalreporter.write_line(line)
