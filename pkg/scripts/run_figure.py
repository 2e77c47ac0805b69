"""Print the log DR class for (g, n, A, k) = (1, 2, (3, -3), 0) next to the expected figure values."""
import argparse
import json

from logdr.cli import FIGURE_LOGDR133, check_logdr133
from logdr.pixton import p_theta_class
from logdr.stability import default_theta


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    th = default_theta(1, 2, seed=args.seed)
    c = p_theta_class(1, 2, (3, -3), 0, th).degree_part(1)
    print(json.dumps(c.to_json(), indent=1))
    problems = check_logdr133(c)
    print("figure check:", "ok" if not problems else problems)
    print("expected:", FIGURE_LOGDR133)


if __name__ == "__main__":
    main()
