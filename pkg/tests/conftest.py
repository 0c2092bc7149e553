"""Prints the acceptance summary, one line per criterion, after the run."""
import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(acceptance_log.RESULTS):
        name, ok, detail = acceptance_log.RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {name}: {detail}")
