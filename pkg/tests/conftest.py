import numpy as np


def dihedral_table(n):
    """Cayley table of the dihedral group of order 2n; r^i s^j has index i + n*j."""
    t = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for x in range(2 * n):
        i, a = x % n, x // n
        for y in range(2 * n):
            j, b = y % n, y // n
            t[x, y] = (i + (-1) ** a * j) % n + n * ((a + b) % 2)
    return t


def cyclic_table(n):
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n



def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
