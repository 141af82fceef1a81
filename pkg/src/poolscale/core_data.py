"""Loss-matrix data model, CSV ingestion/serialization, and pool-level token normalization.

A :class:`LossMatrix` is a dense, complete grid of text-level summed
cross-entropy losses (nats) and token counts, one cell per (model, text).
Partial grids are rejected rather than imputed: the oracle per-text minimum
is undefined over missing entries.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

METADATA_HEADER = ["model_id", "family", "params_billions"]
MATRIX_HEADER = ["model_id", "text_id", "sum_loss_nats", "token_count"]


def _fmt(x: float) -> str:
    """Canonical float formatting: '.' decimal separator, up to 12 significant digits."""
    return format(float(x), ".12g")


@dataclass(frozen=True)
class ModelMeta:
    """Identity, family label, and parameter count (units: 10^9 params) of one pool member."""

    model_id: str
    family: str
    params_billions: float

    def __post_init__(self):
        if not self.model_id:
            raise ValueError("invalid model: empty model_id")
        if not self.family:
            raise ValueError(f"invalid model {self.model_id!r}: family must be non-empty")
        if not (self.params_billions > 0):
            raise ValueError(f"invalid model {self.model_id!r}: params_billions must be > 0")


@dataclass(frozen=True)
class LossCell:
    """Summed token negative log-likelihood (nats) and token count for one (model, text)."""

    sum_loss: float
    token_count: int

    def __post_init__(self):
        if self.sum_loss < 0:
            raise ValueError(f"invalid cell: sum_loss {self.sum_loss} < 0")
        if self.token_count < 1:
            raise ValueError(f"invalid cell: token_count {self.token_count} < 1")


class LossMatrix:
    """Immutable complete grid of :class:`LossCell` over an ordered model pool and text list.

    ``n_bar`` (mean token count over all cells) is computed once at
    construction over the full pool and reused for every subset evaluation.
    """

    def __init__(self, models: list[ModelMeta], texts: list[str], cells: dict[tuple[str, str], LossCell]):
        model_ids = [m.model_id for m in models]
        if len(set(model_ids)) != len(model_ids):
            dup = next(i for i in model_ids if model_ids.count(i) > 1)
            raise ValueError(f"duplicate id: model {dup!r}")
        if len(set(texts)) != len(texts):
            dup = next(t for t in texts if texts.count(t) > 1)
            raise ValueError(f"duplicate id: text {dup!r}")
        if not models or not texts:
            raise ValueError("incomplete matrix: empty model pool or text list")

        loss = np.empty((len(models), len(texts)), dtype=np.float64)
        tokens = np.empty((len(models), len(texts)), dtype=np.int64)
        for i, mid in enumerate(model_ids):
            for j, tid in enumerate(texts):
                cell = cells.get((mid, tid))
                if cell is None:
                    raise ValueError(f"incomplete matrix: missing cell ({mid!r}, {tid!r})")
                loss[i, j] = cell.sum_loss
                tokens[i, j] = cell.token_count
        extra = set(cells) - {(m, t) for m in model_ids for t in texts}
        if extra:
            mid, tid = sorted(extra)[0]
            raise ValueError(f"unknown model or text in cells: ({mid!r}, {tid!r})")

        self._models = tuple(models)
        self._texts = tuple(texts)
        self._loss = loss
        self._tokens = tokens
        self._loss.setflags(write=False)
        self._tokens.setflags(write=False)
        self._index = {mid: i for i, mid in enumerate(model_ids)}
        self._n_bar = float(tokens.mean())

    @property
    def models(self) -> tuple[ModelMeta, ...]:
        return self._models

    @property
    def texts(self) -> tuple[str, ...]:
        return self._texts

    @property
    def model_ids(self) -> tuple[str, ...]:
        return tuple(m.model_id for m in self._models)

    @property
    def n_bar(self) -> float:
        return self._n_bar

    @property
    def loss_grid(self) -> np.ndarray:
        """(n_models, n_texts) array of summed losses, row order = model order."""
        return self._loss

    @property
    def token_grid(self) -> np.ndarray:
        return self._tokens

    def model_index(self, model_id: str) -> int:
        try:
            return self._index[model_id]
        except KeyError:
            raise ValueError(f"unknown model {model_id!r}") from None

    def meta(self, model_id: str) -> ModelMeta:
        return self._models[self.model_index(model_id)]

    def loss_row(self, model_id: str) -> np.ndarray:
        return self._loss[self.model_index(model_id)]

    def cell(self, model_id: str, text_id: str) -> LossCell:
        i = self.model_index(model_id)
        try:
            j = self._texts.index(text_id)
        except ValueError:
            raise ValueError(f"unknown text {text_id!r}") from None
        return LossCell(float(self._loss[i, j]), int(self._tokens[i, j]))


def mean_token_length(matrix: LossMatrix) -> float:
    """Mean token count over all (model, text) cells; equals the cached ``n_bar``."""
    return float(matrix.token_grid.mean())


def load_loss_matrix(metadata_path: str | Path, matrix_path: str | Path) -> LossMatrix:
    """Load and validate a loss matrix from the metadata and matrix CSV files.

    Row/column order of the result follows file order: models in metadata
    order, texts by first appearance in the matrix file.
    """
    metadata_path = Path(metadata_path)
    matrix_path = Path(matrix_path)

    models: list[ModelMeta] = []
    with metadata_path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != METADATA_HEADER:
            raise ValueError(f"bad metadata header {header!r}, expected {METADATA_HEADER!r}")
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"bad metadata row {row!r}")
            try:
                params = float(row[2])
            except ValueError:
                raise ValueError(f"bad metadata row {row!r}: non-numeric params") from None
            models.append(ModelMeta(row[0], row[1], params))

    known = {m.model_id for m in models}
    texts: list[str] = []
    seen_texts: set[str] = set()
    cells: dict[tuple[str, str], LossCell] = {}
    with matrix_path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != MATRIX_HEADER:
            raise ValueError(f"bad matrix header {header!r}, expected {MATRIX_HEADER!r}")
        for row in reader:
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"bad matrix row {row!r}")
            mid, tid = row[0], row[1]
            if mid not in known:
                raise ValueError(f"unknown model {mid!r} in matrix file")
            try:
                sum_loss = float(row[2])
                token_count = int(row[3])
            except ValueError:
                raise ValueError(f"invalid cell ({mid!r}, {tid!r}): non-numeric value") from None
            if sum_loss < 0 or token_count < 1:
                raise ValueError(
                    f"invalid cell ({mid!r}, {tid!r}): sum_loss={sum_loss}, token_count={token_count}"
                )
            if (mid, tid) in cells:
                raise ValueError(f"duplicate id: cell ({mid!r}, {tid!r}) appears twice")
            cells[(mid, tid)] = LossCell(sum_loss, token_count)
            if tid not in seen_texts:
                seen_texts.add(tid)
                texts.append(tid)

    return LossMatrix(models, texts, cells)


def write_metadata_csv(matrix: LossMatrix, path: str | Path) -> None:
    """Canonical metadata serialization: rows sorted by model_id."""
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(METADATA_HEADER)
        for m in sorted(matrix.models, key=lambda m: m.model_id):
            writer.writerow([m.model_id, m.family, _fmt(m.params_billions)])


def write_matrix_csv(matrix: LossMatrix, path: str | Path) -> None:
    """Canonical matrix serialization: rows sorted by (model_id, text_id)."""
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(MATRIX_HEADER)
        for mid in sorted(matrix.model_ids):
            i = matrix.model_index(mid)
            for tid in sorted(matrix.texts):
                j = matrix.texts.index(tid)
                writer.writerow(
                    [mid, tid, _fmt(matrix.loss_grid[i, j]), int(matrix.token_grid[i, j])]
                )
