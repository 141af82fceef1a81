"""Teacher-forced loss harvesting for pools of causal language models."""

from harvester.harvest import harvest, read_corpus, score_text
from harvester.job import HarvestJob, ModelSpec, load_job

__all__ = ["HarvestJob", "ModelSpec", "harvest", "load_job", "read_corpus", "score_text"]
