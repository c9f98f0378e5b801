import csv
import logging
import os

from dotenv import load_dotenv

from args import get_args
from constants import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, WORKERS_ENV_KEY
from errors import ConfigValidationError, IncompatibleRunsError
from experiment import run_experiment
from experiment_config import load_config
from manifest import RunStatus
from summarize import summarize
from utils import setup_logging


class App:
    """Command line front end: run, summarize, validate"""

    def __init__(self, args: list):
        load_dotenv()
        setup_logging()
        self.logger = logging.getLogger(__name__)

        self.args = get_args(args)

    def main(self) -> int:
        match self.args.command:
            case "run":
                return self.run()
            case "summarize":
                return self.summarize()
            case "validate":
                return self.validate()

    def _load(self):
        try:
            return load_config(self.args.config)
        except OSError as e:
            raise ConfigValidationError([f"cannot read {self.args.config}: {e.strerror}"])

    def _report(self, error: ConfigValidationError) -> int:
        for message in error.errors:
            self.logger.error(message)
        self.logger.error(f"{self.args.config}: {len(error.errors)} validation error(s)")
        return EXIT_VALIDATION

    def workers(self):
        """--workers, then NPI_WORKERS, then the config."""
        if self.args.workers is not None:
            return self.args.workers
        value = os.getenv(WORKERS_ENV_KEY)
        if value is None:
            return None
        try:
            return int(value)
        except ValueError:
            raise ConfigValidationError([f"{WORKERS_ENV_KEY}: '{value}' is not an integer"])

    def validate(self) -> int:
        try:
            config = self._load()
        except ConfigValidationError as e:
            return self._report(e)
        self.logger.info(f"{self.args.config}: valid {config.mode.value} config, sub-runs {config.sweep()}")
        return EXIT_OK

    def run(self) -> int:
        try:
            config = self._load().with_overrides(
                seed=self.args.seed, output_dir=self.args.out, workers=self.workers()
            )
        except ConfigValidationError as e:
            return self._report(e)

        try:
            manifest = run_experiment(config)
        except Exception:
            self.logger.exception(f"Run of {self.args.config} failed")
            return EXIT_RUNTIME
        return EXIT_OK if manifest.status == RunStatus.OK else EXIT_RUNTIME

    def summarize(self) -> int:
        try:
            table = summarize(self.args.manifests)
        except IncompatibleRunsError as e:
            self.logger.error(f"Refusing to compare: {e}")
            return EXIT_VALIDATION
        except Exception:
            self.logger.exception("Summary failed")
            return EXIT_RUNTIME

        print(table.render(), end="")
        with open(self.args.out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(table.header)
            writer.writerows([["" if value is None else value for value in row] for row in table.rows])
        self.logger.info(f"Wrote {self.args.out}")
        return EXIT_OK
