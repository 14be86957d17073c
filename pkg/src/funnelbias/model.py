"""Core domain types for diagnostic meta-analysis.

A diagnostic study is a 2x2 table cross-classifying the index test
against a perfect gold standard:

                 test +   test -   total
    diseased        x        w       n1
    healthy         y        z       n2
    total          m1       m2        N

Everything downstream (accuracy measures, asymmetry tests, the
simulation harness) consumes these value objects. All types are
immutable and safe to share across threads or processes.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DatasetFormatError,
    EmptyGroup,
    NegativeCell,
    TooFewStudies,
)

CSV_HEADER = ("study_id", "tp", "fn", "fp", "tn")


class MeasureId(enum.Enum):
    """Univariate accuracy measures; all oriented so larger = more accurate."""

    LNDOR = "lndor"
    NEG_LNTHETA = "lntheta"
    YOUDEN = "youden"
    KAPPA = "kappa"


class CorrectionPolicy(enum.Enum):
    """Zero-cell handling before computing a measure."""

    HALF_IF_ANY_ZERO = "half"
    NEVER = "never"


class Sidedness(enum.Enum):
    ONE_SIDED = "one"
    TWO_SIDED = "two"


@dataclass(frozen=True, slots=True)
class StudyTable:
    """One diagnostic 2x2 table of raw integer counts.

    Construction does not validate; call :meth:`validate` (or
    :func:`validate_dataset`) at trust boundaries.
    """

    x: int  # true positives
    w: int  # false negatives
    y: int  # false positives
    z: int  # true negatives

    @property
    def n1(self) -> int:
        return self.x + self.w

    @property
    def n2(self) -> int:
        return self.y + self.z

    @property
    def m1(self) -> int:
        return self.x + self.y

    @property
    def m2(self) -> int:
        return self.w + self.z

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    def validate(self) -> "StudyTable":
        for name in ("x", "w", "y", "z"):
            cell = getattr(self, name)
            if not isinstance(cell, int) or isinstance(cell, bool):
                raise NegativeCell(f"cell {name} must be an integer count, got {cell!r}")
            if cell < 0:
                raise NegativeCell(f"cell {name} is negative: {cell}")
        if self.n1 == 0:
            raise EmptyGroup("no diseased subjects (n1 = 0)")
        if self.n2 == 0:
            raise EmptyGroup("no healthy subjects (n2 = 0)")
        return self

    def has_zero_cell(self) -> bool:
        return 0 in (self.x, self.w, self.y, self.z)


@dataclass(frozen=True, slots=True)
class CorrectedTable:
    """A 2x2 table after (possible) continuity correction; cells are reals.

    Keeps a reference to the raw source table so that sample-size and
    effective-sample-size bookkeeping always reflects the observed data.
    """

    x: float
    w: float
    y: float
    z: float
    correction_applied: bool
    source: StudyTable

    @property
    def n1(self) -> float:
        return self.x + self.w

    @property
    def n2(self) -> float:
        return self.y + self.z

    @property
    def m1(self) -> float:
        return self.x + self.y

    @property
    def m2(self) -> float:
        return self.w + self.z

    @property
    def n(self) -> float:
        return self.n1 + self.n2


@dataclass(frozen=True, slots=True)
class EffectEstimate:
    """A univariate accuracy estimate for one study: t_i with its SE.

    Carries the source table's size bookkeeping (n, ess, test-result
    marginals m1/m2) because several asymmetry-test variants order or
    weight studies by those quantities rather than by the SE.
    """

    measure: MeasureId
    value: float
    se: float
    ess: float
    n: int
    m1: int
    m2: int

    def __post_init__(self) -> None:
        if not self.se > 0:
            raise ValueError(f"se must be positive, got {self.se}")
        if not self.ess > 0:
            raise ValueError(f"ess must be positive, got {self.ess}")
        if not self.n > 0:
            raise ValueError(f"n must be positive, got {self.n}")

    @property
    def variance(self) -> float:
        return self.se * self.se


@dataclass(frozen=True, slots=True)
class AsymmetryTestResult:
    """Outcome of one funnel-plot asymmetry test on one dataset."""

    test_id: str
    statistic: float
    p_value: float
    sidedness: Sidedness
    alpha: float
    reject: bool
    k0: int | None = None  # trim-and-fill only
    pooled_effect: float | None = None  # trim-and-fill only
    converged: bool = True  # trim-and-fill iteration status

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value out of [0, 1]: {self.p_value}")
        if self.reject != (self.p_value <= self.alpha):
            raise ValueError("reject flag inconsistent with p_value and alpha")


@dataclass(frozen=True)
class MetaDataset:
    """An ordered collection of study tables forming one meta-analysis."""

    studies: tuple[StudyTable, ...]
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "studies", tuple(self.studies))

    @property
    def k(self) -> int:
        return len(self.studies)


MIN_STUDIES = 3  # regression tests need k - 2 >= 1 residual df


def validate_dataset(dataset: MetaDataset) -> MetaDataset:
    """Check every study's invariants and the minimum study count.

    Returns the dataset unchanged on success; raises ``NegativeCell``,
    ``EmptyGroup`` (with the study index in the message) or
    ``TooFewStudies`` otherwise.
    """
    if dataset.k < MIN_STUDIES:
        raise TooFewStudies(f"need at least {MIN_STUDIES} studies, got {dataset.k}")
    for i, study in enumerate(dataset.studies):
        try:
            study.validate()
        except (NegativeCell, EmptyGroup) as exc:
            raise type(exc)(f"study {i}: {exc}") from None
    return dataset


def continuity_correct(table: StudyTable, policy: CorrectionPolicy) -> CorrectedTable:
    """Apply the +0.5 zero-cell correction under the given policy.

    Under ``HALF_IF_ANY_ZERO`` all four cells are incremented by 0.5 as
    soon as any one of them is zero; otherwise (and always under
    ``NEVER``) the cells pass through unchanged.
    """
    if policy is CorrectionPolicy.HALF_IF_ANY_ZERO and table.has_zero_cell():
        return CorrectedTable(
            x=table.x + 0.5,
            w=table.w + 0.5,
            y=table.y + 0.5,
            z=table.z + 0.5,
            correction_applied=True,
            source=table,
        )
    return CorrectedTable(
        x=float(table.x),
        w=float(table.w),
        y=float(table.y),
        z=float(table.z),
        correction_applied=False,
        source=table,
    )


def read_dataset_csv(path: str | Path) -> tuple[MetaDataset, tuple[str, ...]]:
    """Read a dataset from ``study_id,tp,fn,fp,tn`` CSV.

    Returns the dataset plus the study ids in file order. Any structural
    problem (bad header, non-integer cell, negative count, empty group)
    raises :class:`DatasetFormatError` carrying the 1-based line number.
    """
    path = Path(path)
    studies: list[StudyTable] = []
    ids: list[str] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("empty file", line_no=1) from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise DatasetFormatError(
                f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}",
                line_no=1,
            )
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue  # tolerate blank lines
            if len(row) != 5:
                raise DatasetFormatError(
                    f"expected 5 fields, got {len(row)}", line_no=line_no
                )
            study_id = row[0].strip()
            try:
                tp, fn, fp, tn = (int(cell.strip()) for cell in row[1:])
            except ValueError:
                raise DatasetFormatError(
                    f"non-integer cell count in {row[1:]!r}", line_no=line_no
                ) from None
            table = StudyTable(x=tp, w=fn, y=fp, z=tn)
            try:
                table.validate()
            except (NegativeCell, EmptyGroup) as exc:
                raise DatasetFormatError(str(exc), line_no=line_no) from None
            studies.append(table)
            ids.append(study_id)
    return MetaDataset(studies, label=path.stem), tuple(ids)


def write_dataset_csv(
    path: str | Path,
    dataset: MetaDataset,
    study_ids: tuple[str, ...] | None = None,
) -> None:
    """Write a dataset in the same CSV format :func:`read_dataset_csv` parses."""
    if study_ids is None:
        study_ids = tuple(f"s{i + 1}" for i in range(dataset.k))
    if len(study_ids) != dataset.k:
        raise ValueError("study_ids length does not match dataset size")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for sid, t in zip(study_ids, dataset.studies):
            writer.writerow([sid, t.x, t.w, t.y, t.z])
