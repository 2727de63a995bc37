RESULTS = {}  # criterion number -> (passed, label, detail)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        passed, label, detail = RESULTS[num]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {num}: {label}  {detail}".rstrip())
