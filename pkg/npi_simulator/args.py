import argparse


def get_args(args) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="npi",
        description="Non-equilibrium path-integral simulator: ring-polymer MD, branched NEMD and master equations",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one experiment from a JSON config")
    run.add_argument("config", type=str, help="experiment config file")
    run.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    run.add_argument("--out", type=str, default=None, help="overrides the config output directory")
    run.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker threads for branches and scans (env NPI_WORKERS, then the config)",
    )

    summarize = commands.add_parser("summarize", help="compare the manifests of finished runs")
    summarize.add_argument("manifests", nargs="+", type=str, help="manifest.json files")
    summarize.add_argument("--out", type=str, default="summary.csv", help="CSV file for the comparison table")

    validate = commands.add_parser("validate", help="report every problem in a config without running it")
    validate.add_argument("config", type=str, help="experiment config file")

    return parser.parse_args(args)
