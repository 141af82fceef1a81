"""Teacher-forced scoring of causal LMs over a line-per-text corpus.

For each (model, text) the harvest records the sum of next-token
negative log-likelihoods in nats under the model's own tokenizer, plus the
tokenized length. Texts that exceed any model's context window (or tokenize
to fewer than 2 tokens for any model) are skipped for ALL models so the
emitted matrix stays complete; truncation is deliberately avoided because it
would shorten texts inconsistently across tokenizers.

One model is resident at a time; tokenizers for all models are loaded up
front to decide the shared skip set before any weights load.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import torch
import torch.nn.functional as F
from transformers import AutoConfig, AutoModelForCausalLM, AutoTokenizer

from harvester.job import HarvestJob, ModelSpec

log = logging.getLogger("harvester")

_SANE_CONTEXT_CAP = 10**8  # tokenizers report huge sentinel model_max_length when unset


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _context_limit(config, tokenizer) -> int:
    candidates = []
    for attr in ("n_positions", "max_position_embeddings"):
        value = getattr(config, attr, None)
        if isinstance(value, int) and 0 < value < _SANE_CONTEXT_CAP:
            candidates.append(value)
    if isinstance(tokenizer.model_max_length, int) and 0 < tokenizer.model_max_length < _SANE_CONTEXT_CAP:
        candidates.append(tokenizer.model_max_length)
    return min(candidates) if candidates else _SANE_CONTEXT_CAP


def read_corpus(path: Path, max_texts: int | None = None) -> list[str]:
    lines = [line.rstrip("\n") for line in path.read_text(encoding="utf-8").splitlines()]
    texts = [line for line in lines if line.strip()]
    if not texts:
        raise ValueError(f"empty corpus: {path}")
    if max_texts is not None:
        texts = texts[:max_texts]
    return texts


def _load_model(spec: ModelSpec, dtype: torch.dtype, device: str):
    try:
        model = AutoModelForCausalLM.from_pretrained(spec.ref, torch_dtype=dtype)
    except Exception as exc:
        raise RuntimeError(f"model load failure: {spec.ref}: {exc}") from exc
    return model.to(device).eval()


def score_text(model, token_ids: torch.Tensor) -> float:
    """Sum of next-token cross-entropy (nats) for one tokenized text.

    The first token has no conditioning prefix; losses start at position 2
    of the sequence (logits at position j predict token j+1).
    """
    with torch.no_grad():
        logits = model(token_ids.unsqueeze(0)).logits[0]
    return float(F.cross_entropy(logits[:-1], token_ids[1:], reduction="sum"))


def harvest(job: HarvestJob) -> dict:
    """Run the job; writes metadata CSV, matrix CSV, and a scoring manifest.

    Returns the manifest (models, texts kept/skipped, scoring conventions).
    """
    texts = read_corpus(job.corpus, job.max_texts)
    dtype = getattr(torch, job.dtype)

    # pass 1: tokenize everything with every model's own tokenizer
    encodings: dict[str, list[torch.Tensor]] = {}
    limits: dict[str, int] = {}
    for spec in job.models:
        try:
            tokenizer = AutoTokenizer.from_pretrained(spec.ref)
            config = AutoConfig.from_pretrained(spec.ref)
        except Exception as exc:
            raise RuntimeError(f"model load failure: {spec.ref}: {exc}") from exc
        limits[spec.model_id] = _context_limit(config, tokenizer)
        encodings[spec.model_id] = [
            torch.tensor(tokenizer(text, add_special_tokens=True)["input_ids"], dtype=torch.long)
            for text in texts
        ]

    skipped: dict[str, str] = {}
    for j, _ in enumerate(texts):
        for spec in job.models:
            n = len(encodings[spec.model_id][j])
            if n > limits[spec.model_id]:
                skipped[f"t{j:04d}"] = f"exceeds context window of {spec.model_id} ({n} > {limits[spec.model_id]})"
                break
            if n < 2:
                skipped[f"t{j:04d}"] = f"tokenizes to fewer than 2 tokens under {spec.model_id}"
                break
    kept = [(j, f"t{j:04d}") for j in range(len(texts)) if f"t{j:04d}" not in skipped]
    for tid, reason in skipped.items():
        log.warning("skipping %s for all models: %s", tid, reason)
    if not kept:
        raise ValueError("empty corpus: every text was skipped")

    # pass 2: one model resident at a time
    rows: dict[tuple[str, str], tuple[float, int]] = {}
    params: dict[str, float] = {}
    for spec in job.models:
        model = _load_model(spec, dtype, job.device)
        params[spec.model_id] = (
            spec.params_billions
            if spec.params_billions is not None
            else model.num_parameters() / 1e9
        )
        for j, tid in kept:
            ids = encodings[spec.model_id][j].to(job.device)
            rows[(spec.model_id, tid)] = (score_text(model, ids), len(ids))
        del model

    job.metadata_csv.parent.mkdir(parents=True, exist_ok=True)
    with job.metadata_csv.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["model_id", "family", "params_billions"])
        for spec in sorted(job.models, key=lambda s: s.model_id):
            writer.writerow([spec.model_id, spec.family, _fmt(params[spec.model_id])])

    job.matrix_csv.parent.mkdir(parents=True, exist_ok=True)
    with job.matrix_csv.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["model_id", "text_id", "sum_loss_nats", "token_count"])
        for spec in sorted(job.models, key=lambda s: s.model_id):
            for _, tid in kept:
                sum_loss, count = rows[(spec.model_id, tid)]
                writer.writerow([spec.model_id, tid, _fmt(sum_loss), count])

    manifest = {
        "models": [
            {"model_id": s.model_id, "ref": s.ref, "family": s.family, "params_billions": params[s.model_id]}
            for s in job.models
        ],
        "texts_scored": len(kept),
        "texts_skipped": skipped,
        "conventions": {
            "loss_units": "nats (natural-log cross-entropy)",
            "special_tokens": "tokenizer default add_special_tokens=True; BOS included if the tokenizer adds one",
            "first_scored_position": "second token of the tokenized sequence (first token has no prefix)",
            "token_count": "full tokenized length including special tokens",
            "context_handling": "texts beyond any model's context window skipped for all models",
            "dtype": job.dtype,
            "device": job.device,
        },
    }
    manifest_path = job.metadata_csv.with_name(job.metadata_csv.stem + "_manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
