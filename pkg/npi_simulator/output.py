import csv
import logging
import os
import threading

from constants import MANIFEST_FILE
from manifest import RunManifest


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


class OutputWriter:
    """
    The single writer of a run's output directory.

    Every emitted file goes through here and is listed in the manifest the
    moment it is written. Writes are only accepted from the thread that
    created the writer; worker threads hand their results back instead.
    """

    def __init__(self, out_dir: str, manifest: RunManifest):
        self.logger = logging.getLogger(self.__class__.__name__)

        self.out_dir = out_dir
        self.manifest = manifest
        self.owner = threading.get_ident()
        os.makedirs(out_dir, exist_ok=True)

    def _claim(self, name: str) -> str:
        assert threading.get_ident() == self.owner, "output written from a worker thread"
        assert name != MANIFEST_FILE

        self.manifest.add_file(name)
        return os.path.join(self.out_dir, name)

    def write_csv(self, name: str, header: list[str], rows) -> str:
        path = self._claim(name)
        count = 0
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                assert len(row) == len(header), f"{name}: row {row} does not match header {header}"
                writer.writerow([_cell(value) for value in row])
                count += 1
        self.logger.info(f"Wrote {name} ({count} rows)")
        return path

    def write_text(self, name: str, text: str) -> str:
        path = self._claim(name)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        return path

    def write_with(self, name: str, writer) -> str:
        """Lets writer(path) produce the file, e.g. a checkpoint or the metrics dump."""
        path = self._claim(name)
        writer(path)
        return path

    def write_manifest(self) -> str:
        path = os.path.join(self.out_dir, MANIFEST_FILE)
        self.manifest.write(path)
        return path
