"""Run every acceptance check and print one line per criterion."""

import sys
import time

from gupnl.acceptance import ALL_CHECKS


def main():
    failed = 0
    for check in ALL_CHECKS:
        t0 = time.perf_counter()
        result = check()
        print(f"{result.line()}  [{time.perf_counter() - t0:.1f}s]", flush=True)
        failed += not result.passed
    print(f"{len(ALL_CHECKS) - failed}/{len(ALL_CHECKS)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
