import json

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers, trainers
from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

CORPUS = [
    "the quick brown fox jumps over the lazy dog",
    "a watched pot never boils but it does simmer",
    "language models assign probabilities to token sequences",
    "scaling up parameters tends to reduce held out loss",
    "pareto frontiers trace the best achievable trade offs",
    "every ensemble is bounded below by its best member",
    "heterogeneous pools cover complementary text domains",
    "tokenizers split the same text into different pieces",
    "cross entropy in nats uses the natural logarithm",
    "teacher forcing scores each next token prediction",
    "small models saturate early on easy benchmarks",
    "the oracle picks the cheapest explanation per text",
    "budgets sum parameter counts across pool members",
    "diminishing returns demand exponentially more compute",
    "base models are evaluated before any alignment tuning",
    "held out corpora should not leak into training data",
    "power laws appear straight on log log axes",
    "residuals shrink as the fit approaches the floor",
    "random seeds pin every synthetic benchmark run",
    "collaboration shifts the entire loss curve downward",
]


def build_tiny_model(path, seed, vocab_size=220, n_embd=32, n_layer=2, n_positions=64):
    """Train a tiny BPE tokenizer on the corpus and pair it with a random-init GPT2."""
    tok = Tokenizer(models.BPE(unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    tok.train_from_iterator(CORPUS, trainers.BpeTrainer(vocab_size=vocab_size, special_tokens=["<unk>"]))
    fast = PreTrainedTokenizerFast(tokenizer_object=tok, unk_token="<unk>")
    config = GPT2Config(
        vocab_size=fast.vocab_size,
        n_embd=n_embd,
        n_layer=n_layer,
        n_head=2,
        n_positions=n_positions,
        bos_token_id=0,
        eos_token_id=0,
    )
    torch.manual_seed(seed)
    model = GPT2LMHeadModel(config)
    model.save_pretrained(path)
    fast.save_pretrained(path)
    return path


@pytest.fixture(scope="session")
def model_pool(tmp_path_factory):
    """Two small local base models with their own tokenizers, plus the corpus file."""
    root = tmp_path_factory.mktemp("pool")
    model_a = build_tiny_model(root / "model_a", seed=1, vocab_size=220, n_embd=32)
    model_b = build_tiny_model(root / "model_b", seed=2, vocab_size=160, n_embd=48)
    corpus = root / "corpus.txt"
    corpus.write_text("\n".join(CORPUS) + "\n", encoding="utf-8")
    return {"model_a": model_a, "model_b": model_b, "corpus": corpus, "root": root}


def write_job(path, pool, **overrides):
    spec = {
        "models": [
            {"ref": str(pool["model_a"]), "id": "model_a", "family": "alpha"},
            {"ref": str(pool["model_b"]), "id": "model_b", "family": "beta"},
        ],
        "corpus": str(pool["corpus"]),
        "max_texts": 20,
        "metadata_csv": str(path.parent / "metadata.csv"),
        "matrix_csv": str(path.parent / "matrix.csv"),
    }
    spec.update(overrides)
    path.write_text(json.dumps(spec, indent=2), encoding="utf-8")
    return path
