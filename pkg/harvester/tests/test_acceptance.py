"""Acceptance: harvested matrices round-trip through the analysis toolkit's CSV
ingestion, repeat runs agree per cell, and per-token losses sit in a sane band."""

import csv

from poolscale.core_data import load_loss_matrix

from harvester.harvest import harvest
from harvester.job import load_job
from conftest import write_job


def test_harvester_round_trip(model_pool, tmp_path):
    job = load_job(write_job(tmp_path / "job.json", model_pool))
    harvest(job)

    # validates under the toolkit's loader with zero errors
    matrix = load_loss_matrix(job.metadata_csv, job.matrix_csv)
    assert len(matrix.models) == 2
    assert len(matrix.texts) == 20

    # per-token mean loss in the (0, 20) nats sanity corridor
    per_token = matrix.loss_grid / matrix.token_grid
    assert (per_token > 0).all() and (per_token < 20).all()

    # repeat run matches within 1e-4 relative per cell
    rerun_dir = tmp_path / "rerun"
    rerun_dir.mkdir()
    job2 = load_job(write_job(rerun_dir / "job.json", model_pool))
    harvest(job2)
    with job.matrix_csv.open() as f:
        first = {(r["model_id"], r["text_id"]): float(r["sum_loss_nats"]) for r in csv.DictReader(f)}
    with job2.matrix_csv.open() as f:
        second = {(r["model_id"], r["text_id"]): float(r["sum_loss_nats"]) for r in csv.DictReader(f)}
    assert first.keys() == second.keys()
    for key, value in first.items():
        assert abs(second[key] - value) <= 1e-4 * abs(value)

    print("\nPASS: harvester round-trip: 2 models x 20 texts validate, repeat within 1e-4 rel, per-token loss in (0, 20) nats")
