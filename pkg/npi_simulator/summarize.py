import logging
import math

from errors import DomainError, IncompatibleRunsError
from manifest import RunManifest

logger = logging.getLogger(__name__)

# bookkeeping fields that are never compared
SKIPPED_FIELDS = ("n_beads", "seed")


def _is_value(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class SummaryTable:
    def __init__(self, header: list[str], rows: list[list]):
        self.header = header
        self.rows = rows

    def column(self, name: str) -> list:
        index = self.header.index(name)
        return [row[index] for row in self.rows]

    def render(self) -> str:
        cells = [self.header] + [[_format(value) for value in row] for row in self.rows]
        widths = [max(len(row[index]) for row in cells) for index in range(len(self.header))]
        lines = ["  ".join(cell.rjust(width) for cell, width in zip(row, widths)) for row in cells]
        lines.insert(1, "  ".join("-" * width for width in widths))
        return "\n".join(lines) + "\n"


def _format(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def summarize(manifest_paths: list[str]) -> SummaryTable:
    """
    Cross-run table of the per-P summaries of compatible runs, sorted by P.
    Every compared quantity gets its value, the change from the previous row
    and that change relative to the previous value.
    """
    if not manifest_paths:
        raise DomainError("summarize needs at least one manifest")

    manifests = [RunManifest.load(path) for path in manifest_paths]
    reference = manifests[0]
    for path, manifest in zip(manifest_paths, manifests):
        if manifest.physics_hash != reference.physics_hash:
            raise IncompatibleRunsError(
                f"{path} ({manifest.mode}) simulates different physics than {manifest_paths[0]} "
                f"({reference.mode}); only runs differing in seed, P, run length or output may be compared"
            )

    entries = [
        (summary.get("n_beads", 1), index, path, summary)
        for index, (path, manifest) in enumerate(zip(manifest_paths, manifests))
        for summary in manifest.summaries
    ]
    entries.sort(key=lambda entry: (entry[0], entry[1]))
    if not entries:
        logger.warning("No summaries found in the given manifests")

    fields = []
    for _, _, _, summary in entries:
        for name, value in summary.items():
            if name not in fields and name not in SKIPPED_FIELDS and _is_value(value):
                fields.append(name)
    fields = [name for name in fields if all(_is_value(entry[3].get(name)) for entry in entries)]

    header = ["run", "n_beads"]
    for name in fields:
        header += [name, f"delta_{name}", f"rel_delta_{name}"]

    rows = []
    previous = None
    for n_beads, _, path, summary in entries:
        row = [path, n_beads]
        for name in fields:
            value = summary[name]
            delta = relative = None
            if previous is not None:
                delta = value - previous[name]
                relative = abs(delta) / abs(previous[name]) if previous[name] != 0 else (0.0 if delta == 0 else math.inf)
            row += [value, delta, relative]
        rows.append(row)
        previous = summary
    return SummaryTable(header, rows)
