"""``python -m hydraplan.lp.highs_bridge MODEL.mps SOLUTION.sol``"""

import sys

from .external import solve_mps_with_scipy


def main(argv=None) -> int:
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 2:
        print("usage: highs_bridge MODEL.mps SOLUTION.sol", file=sys.stderr)
        return 2
    solve_mps_with_scipy(args[0], args[1])
    return 0


if __name__ == "__main__":
    sys.exit(main())
