"""Text-overlap metrics for generated questions and QA answers.

Tokenization for the n-gram metrics: lowercase, detach punctuation into
separate tokens, split on whitespace. This is recorded in every report
header. All scores are fractions in [0, 1] except CIDEr, which follows the
conventional x10 scale.
"""

from __future__ import annotations

import math
import re
import string
from collections import Counter

from ._lcs import lcs_length
from .errors import MetricError

TOKENIZER_SPEC = "lowercase; punctuation detached as separate tokens; whitespace split"

# Corpus = list of (hypothesis, references) pairs.
Corpus = "list[tuple[str, list[str]]]"

_PUNCT_RE = re.compile(r"([^\w\s])")


def tokenize(text: str) -> list[str]:
    return _PUNCT_RE.sub(r" \1 ", text.lower()).split()


def _check_corpus(corpus) -> None:
    if not corpus:
        raise MetricError("empty corpus")
    for i, (hyp, refs) in enumerate(corpus):
        if not isinstance(hyp, str):
            raise MetricError(f"item {i}: hypothesis must be a string")
        if not refs:
            raise MetricError(f"item {i}: at least one reference required")


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(corpus, n: int) -> float:
    """Corpus-level BLEU with modified n-gram precision and brevity penalty.

    Geometric mean over orders 1..n, no smoothing: a zero precision at any
    order zeroes the score. Reference length is the closest to the
    hypothesis length, ties resolved toward the shorter reference.
    """
    if not 1 <= n <= 4:
        raise MetricError(f"bleu order must be in 1..4, got {n}")
    _check_corpus(corpus)
    clipped = [0] * (n + 1)
    total = [0] * (n + 1)
    hyp_len = 0
    ref_len = 0
    for hyp, refs in corpus:
        hyp_toks = tokenize(hyp)
        ref_toks = [tokenize(r) for r in refs]
        hyp_len += len(hyp_toks)
        ref_len += min((abs(len(r) - len(hyp_toks)), len(r)) for r in ref_toks)[1]
        for k in range(1, n + 1):
            counts = _ngrams(hyp_toks, k)
            if not counts:
                continue
            max_ref = Counter()
            for r in ref_toks:
                for gram, c in _ngrams(r, k).items():
                    if c > max_ref[gram]:
                        max_ref[gram] = c
            total[k] += sum(counts.values())
            clipped[k] += sum(min(c, max_ref[gram]) for gram, c in counts.items())
    log_sum = 0.0
    for k in range(1, n + 1):
        if total[k] == 0 or clipped[k] == 0:
            return 0.0
        log_sum += math.log(clipped[k] / total[k]) / n
    if hyp_len == 0:
        return 0.0
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * math.exp(log_sum)


def rouge_l(hyp: str, ref: str, beta: float = 1.2) -> float:
    """LCS-based F-measure; beta > 1 weights recall over precision."""
    hyp_toks = tokenize(hyp)
    ref_toks = tokenize(ref)
    if not hyp_toks or not ref_toks:
        return 0.0
    vocab: dict[str, int] = {}
    a = [vocab.setdefault(t, len(vocab)) for t in hyp_toks]
    b = [vocab.setdefault(t, len(vocab)) for t in ref_toks]
    lcs = lcs_length(a, b)
    if lcs == 0:
        return 0.0
    p = lcs / len(hyp_toks)
    r = lcs / len(ref_toks)
    return (1 + beta * beta) * p * r / (r + beta * beta * p)


def light_stem(token: str) -> str:
    """Tiny suffix stripper for the METEOR-s stem stage (not a full stemmer)."""
    if len(token) > 4 and token.endswith("ing"):
        stem = token[:-3]
    elif len(token) > 3 and token.endswith("ed"):
        stem = token[:-2]
    else:
        if len(token) > 5 and token.endswith("sses"):
            return token[:-2]
        if len(token) > 3 and token.endswith("es") and not token.endswith("ses"):
            return token[:-2]
        if len(token) > 3 and token.endswith("s") and not token.endswith(("ss", "us", "is")):
            return token[:-1]
        return token
    # Undouble final consonants from -ing/-ed stems (running -> run) but keep
    # double s so "passed" and "passes" land on the same stem.
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "aeious":
        stem = stem[:-1]
    return stem


def _chunk_count(matches: list[tuple[int, int]]) -> int:
    if not matches:
        return 0
    matches = sorted(matches)
    chunks = 1
    for (i0, j0), (i1, j1) in zip(matches, matches[1:]):
        if i1 != i0 + 1 or j1 != j0 + 1:
            chunks += 1
    return chunks


def _align(hyp: list[str], ref: list[str], node_budget: int = 100_000):
    """Unigram alignment: max exact matches, then max stem matches, then
    fewest chunks. Exhaustive search with a node budget; greedy beyond it."""
    m, n = len(hyp), len(ref)
    hyp_stems = [light_stem(t) for t in hyp]
    ref_stems = [light_stem(t) for t in ref]
    compat: list[list[tuple[int, int]]] = []
    for i in range(m):
        opts = []
        for j in range(n):
            if hyp[i] == ref[j]:
                opts.append((j, 1))  # exact
            elif hyp_stems[i] == ref_stems[j]:
                opts.append((j, 0))  # stem
        compat.append(opts)

    best: dict = {"key": (-1, -1, 0), "matches": []}
    nodes = 0

    def run(i, used, matches, exact, total):
        nonlocal nodes
        if nodes > node_budget:
            return
        nodes += 1
        if i == m:
            key = (exact, total, -_chunk_count(matches))
            if key > best["key"]:
                best["key"] = key
                best["matches"] = list(matches)
            return
        # optimistic bound: every remaining position could match exactly
        remaining = sum(1 for k in range(i, m) if compat[k])
        if (exact + remaining, total + remaining, 0) < best["key"]:
            return
        for j, is_exact in compat[i]:
            if j in used:
                continue
            used.add(j)
            matches.append((i, j))
            run(i + 1, used, matches, exact + is_exact, total + 1)
            matches.pop()
            used.remove(j)
        run(i + 1, used, matches, exact, total)

    run(0, set(), [], 0, 0)
    if nodes > node_budget:
        # deterministic greedy fallback: exact pass then stem pass, in order
        used: set[int] = set()
        matches = []
        for want_exact in (1, 0):
            for i in range(m):
                if any(i == mi for mi, _ in matches):
                    continue
                for j, is_exact in compat[i]:
                    if is_exact == want_exact and j not in used:
                        used.add(j)
                        matches.append((i, j))
                        break
        return sorted(matches)
    return sorted(best["matches"])


def meteor_simplified(
    hyp: str,
    ref: str,
    alpha: float = 0.9,
    beta: float = 3.0,
    gamma: float = 0.5,
) -> float:
    """Two-stage (exact, stem) unigram METEOR with fragmentation penalty.

    penalty = gamma * (chunks / matches) ** beta, defined as 0 when the
    alignment forms a single chunk so identical strings score exactly 1.
    """
    hyp_toks = tokenize(hyp)
    ref_toks = tokenize(ref)
    if not hyp_toks or not ref_toks:
        return 0.0
    matches = _align(hyp_toks, ref_toks)
    m = len(matches)
    if m == 0:
        return 0.0
    p = m / len(hyp_toks)
    r = m / len(ref_toks)
    f_mean = p * r / (alpha * p + (1 - alpha) * r)
    chunks = _chunk_count(matches)
    penalty = 0.0 if chunks <= 1 else gamma * (chunks / m) ** beta
    return f_mean * (1.0 - penalty)


def cider(corpus, n_max: int = 4) -> float:
    """tf-idf n-gram cosine consensus, averaged over orders 1..n_max, x10.

    Document frequency counts each item once when any of its references
    contains the n-gram; idf = log(N / max(df, 1)).
    """
    _check_corpus(corpus)
    if len(corpus) < 2:
        raise MetricError("cider needs at least two items for meaningful idf")
    items = [(tokenize(h), [tokenize(r) for r in refs]) for h, refs in corpus]
    n_items = len(items)
    df: list[Counter] = [Counter() for _ in range(n_max + 1)]
    for _, refs in items:
        for k in range(1, n_max + 1):
            grams = set()
            for r in refs:
                grams.update(_ngrams(r, k))
            for g in grams:
                df[k][g] += 1

    def vec(tokens, k):
        counts = _ngrams(tokens, k)
        return {g: c * math.log(n_items / max(df[k][g], 1)) for g, c in counts.items()}

    def cos(u, v):
        dot = sum(w * v[g] for g, w in u.items() if g in v)
        nu = math.sqrt(sum(w * w for w in u.values()))
        nv = math.sqrt(sum(w * w for w in v.values()))
        if nu == 0 or nv == 0:
            return 0.0
        return dot / (nu * nv)

    total = 0.0
    for hyp_toks, ref_toks in items:
        item_score = 0.0
        for k in range(1, n_max + 1):
            hv = vec(hyp_toks, k)
            item_score += sum(cos(hv, vec(r, k)) for r in ref_toks) / len(ref_toks)
        total += item_score / n_max
    return 10.0 * total / n_items


def normalize_answer(text: str) -> str:
    """SQuAD-style: lowercase, strip punctuation and articles, squeeze spaces."""
    text = text.lower()
    text = "".join(ch for ch in text if ch not in string.punctuation)
    text = re.sub(r"\b(a|an|the)\b", " ", text)
    return " ".join(text.split())


def exact_match(pred: str, gold: str) -> float:
    return float(normalize_answer(pred) == normalize_answer(gold))


def token_f1(pred: str, gold: str) -> float:
    pred_toks = normalize_answer(pred).split()
    gold_toks = normalize_answer(gold).split()
    if not pred_toks and not gold_toks:
        return 1.0
    if not pred_toks or not gold_toks:
        return 0.0
    common = Counter(pred_toks) & Counter(gold_toks)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_toks)
    recall = overlap / len(gold_toks)
    return 2 * precision * recall / (precision + recall)
