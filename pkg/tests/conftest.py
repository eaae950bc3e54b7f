"""Shared pytest plumbing: collect the acceptance-criterion result lines and
print them in the terminal summary, where pytest's output capture cannot
swallow them."""

acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
