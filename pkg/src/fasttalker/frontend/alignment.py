"""TextGrid-subset alignment files: parse interval tiers into frame counts."""

import re
from dataclasses import dataclass

from ..errors import AlignmentError, FormatError


def round_half_up(x: float) -> int:
    """Round with ties away from zero for nonnegative x."""
    return int(x + 0.5)


@dataclass(frozen=True)
class AlignmentTable:
    """Per-phoneme frame counts at a fixed frame rate."""

    labels: tuple
    durations: tuple  # positive frame counts, one per label
    frame_rate: float

    def __post_init__(self):
        if len(self.labels) != len(self.durations):
            raise AlignmentError("labels and durations differ in length")
        if not self.durations:
            raise AlignmentError("empty alignment")
        if any(d < 1 for d in self.durations):
            raise AlignmentError("durations must be positive frame counts")
        if self.frame_rate <= 0:
            raise AlignmentError("frame rate must be positive")

    @property
    def total_frames(self) -> int:
        return int(sum(self.durations))


_KV = re.compile(r"^\s*([A-Za-z ]+?)\s*(?:\[\d*\]\s*)?=\s*(.*?)\s*$")


def _parse_value(raw: str):
    if raw.startswith('"'):
        return raw.strip('"')
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_alignment(text: str, frame_rate: float = 100.0,
                    expected_labels=None) -> AlignmentTable:
    """Parse a TextGrid-style interval tier into an AlignmentTable.

    Frames per interval = round_half_up((xmax - xmin) * frame_rate), floor 1.
    Gaps between intervals are allowed; overlap or disorder is an error.
    """
    intervals = []  # (xmin, xmax, label)
    current = {}
    in_intervals = False
    saw_tier = False
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("intervals [") or stripped.startswith(
                "intervals:"):
            if current:
                intervals.append(current)
                current = {}
            in_intervals = stripped.startswith("intervals [")
            continue
        if stripped.startswith("item ["):
            if current:
                intervals.append(current)
                current = {}
            in_intervals = False
            continue
        match = _KV.match(line)
        if not match:
            continue
        key, value = match.group(1), _parse_value(match.group(2))
        if key == "class":
            saw_tier = saw_tier or value == "IntervalTier"
        if in_intervals and key in ("xmin", "xmax", "text"):
            current[key] = value
    if current:
        intervals.append(current)
    if not saw_tier or not intervals:
        raise FormatError("no IntervalTier intervals found")

    labels, durations = [], []
    prev_end = None
    for item in intervals:
        if not {"xmin", "xmax", "text"} <= item.keys():
            raise FormatError(f"interval missing fields: {sorted(item)}")
        xmin, xmax, label = item["xmin"], item["xmax"], item["text"]
        if not isinstance(xmin, float) or not isinstance(xmax, float):
            raise FormatError("interval bounds must be numeric")
        if xmax <= xmin:
            raise AlignmentError(f"interval out of order: [{xmin}, {xmax}]")
        if prev_end is not None and xmin < prev_end - 1e-9:
            raise AlignmentError(f"interval overlaps previous at {xmin}")
        prev_end = xmax
        labels.append(str(label))
        durations.append(max(1, round_half_up((xmax - xmin) * frame_rate)))

    if expected_labels is not None and list(expected_labels) != labels:
        raise AlignmentError("alignment labels do not match phoneme sequence")
    return AlignmentTable(tuple(labels), tuple(durations), frame_rate)


def serialize_alignment(table: AlignmentTable, tier_name: str = "phones"
                        ) -> str:
    """Emit a TextGrid-subset document; parse_alignment inverts it."""
    edges = [0.0]
    for d in table.durations:
        edges.append(edges[-1] + d / table.frame_rate)
    lines = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "xmin = 0",
        f"xmax = {edges[-1]:.6f}",
        "tiers? <exists>",
        "size = 1",
        "item []:",
        "    item [1]:",
        '        class = "IntervalTier"',
        f'        name = "{tier_name}"',
        "        xmin = 0",
        f"        xmax = {edges[-1]:.6f}",
        f"        intervals: size = {len(table.labels)}",
    ]
    for i, label in enumerate(table.labels):
        lines += [
            f"        intervals [{i + 1}]:",
            f"            xmin = {edges[i]:.6f}",
            f"            xmax = {edges[i + 1]:.6f}",
            f'            text = "{label}"',
        ]
    return "\n".join(lines) + "\n"
