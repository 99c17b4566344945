"""Reproducible experiment harness: worst-case parse sequences, first-hit
index statistics, ensemble failure decomposition, and the covering converse.

Every run is driven by an explicit seed list (or a master seed it is derived
from), workers receive disjoint seed chunks, and reductions are pure merges,
so reports are bit-identical for a given config regardless of worker count.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .codec import CodebookStream, decode, encode, index_code_encode, theoretical_length
from .converse import (
    converse_length_bound,
    covering_lower_bound,
    double_counting_check,
    enumerate_type_class,
    greedy_cover,
    short_codeword_count,
    shortest_first_lengths,
)
from .core import Alphabet, Block, EmpiricalDistribution, enumerate_blocks
from .distortion import distortion, spec_from_json
from .errors import PreconditionError, UncodableInputError
from .lz78 import lz_parse
from .universal import build_universal_table, sphere_mass

__all__ = [
    "SCHEMA_VERSION",
    "ALPHA",
    "DEFAULT_MASTER_SEED",
    "derive_seed",
    "CountingSequence",
    "build_counting_sequence",
    "ExperimentConfig",
    "AchievabilityRow",
    "AchievabilityReport",
    "achievability_experiment",
    "EnsembleFailureReport",
    "ensemble_failure_experiment",
    "ConverseExperimentReport",
    "converse_experiment",
    "run_experiment",
    "dkw_band",
]

SCHEMA_VERSION = "1"
ALPHA = 0.01  # fixed significance for every statistical check
DEFAULT_MASTER_SEED = 77003917


def derive_seed(master: int, *indices: int) -> int:
    """Stable 64-bit child seed from a master seed and an index path."""
    h = hashlib.sha256()
    h.update(b"unirdc-seed")
    h.update((master & (1 << 128) - 1).to_bytes(16, "big"))
    for i in indices:
        h.update((i & (1 << 64) - 1).to_bytes(8, "big"))
    return int.from_bytes(h.digest()[:8], "big")


def dkw_band(trials: int, alpha: float = ALPHA) -> float:
    """Two-sided uniform CDF deviation allowed with probability 1 - alpha."""
    return math.sqrt(math.log(2 / alpha) / (2 * trials))


@dataclass(frozen=True)
class CountingSequence:
    """Concatenation of all words of lengths 1..depth in lexicographic order.

    Its incremental parse is exactly that word list, which makes it the
    classic worst case for the phrase count at its length.
    """

    depth: int
    alphabet_size: int
    block: Block
    phrase_count: int
    bit_length: int

    @property
    def length(self) -> int:
        return self.block.n

    @property
    def measured_epsilon(self) -> float:
        """Parse code length over the raw-rate floor n log2 K, minus one."""
        return self.bit_length / (self.length * math.log2(self.alphabet_size)) - 1.0


def counting_length(depth: int, alphabet_size: int) -> int:
    """Closed form for the sequence length."""
    k, m = alphabet_size, depth
    value = Fraction(k, (k - 1) ** 2) * (m * k ** (m + 1) - (m + 1) * k**m + 1)
    assert value.denominator == 1
    return int(value)


def counting_phrases(depth: int, alphabet_size: int) -> int:
    """Closed form for the phrase count."""
    k, m = alphabet_size, depth
    return (k ** (m + 1) - k) // (k - 1)


def build_counting_sequence(depth: int, alphabet_size: int) -> CountingSequence:
    if depth < 1:
        raise PreconditionError("depth must be positive")
    if alphabet_size < 2:
        raise PreconditionError("alphabet size must be at least 2")
    symbols: list[int] = []
    for i in range(1, depth + 1):
        for word in product(range(alphabet_size), repeat=i):
            symbols.extend(word)
    block = Block(tuple(symbols))
    assert block.n == counting_length(depth, alphabet_size)
    parse = lz_parse(block, alphabet_size)
    assert parse.phrase_count == counting_phrases(depth, alphabet_size)
    assert not parse.final_is_duplicate
    return CountingSequence(
        depth=depth,
        alphabet_size=alphabet_size,
        block=block,
        phrase_count=parse.phrase_count,
        bit_length=parse.bit_length,
    )


@dataclass
class ExperimentConfig:
    """Inputs shared by the experiment drivers; JSON-round-trippable."""

    n: int
    source_alphabet: str = "01"
    repro_alphabet: str = "01"
    order: int = 1
    level: Fraction = Fraction(1, 4)
    distortion: dict = field(default_factory=lambda: {"kind": "hamming"})
    trials: int = 100
    master_seed: int = DEFAULT_MASTER_SEED
    seeds: tuple[int, ...] | None = None
    epsilon: float = 1.0
    base: float | None = None
    max_draws: int = 1 << 20
    mode: str = "exact"
    length_mode: str = "plain"
    slack_bits: float = 0.0
    type_counts: dict | None = None
    source_blocks: tuple[str, ...] | None = None
    jobs: int = 1

    def spec(self):
        data = dict(self.distortion)
        data.setdefault(
            "alphabets", {"source": self.source_alphabet, "repro": self.repro_alphabet}
        )
        return spec_from_json(json.dumps(data))

    def seed_list(self) -> list[int]:
        if self.seeds is not None:
            return list(self.seeds)
        return [derive_seed(self.master_seed, i) for i in range(self.trials)]

    def stream(self, seed: int, table=None) -> CodebookStream:
        return CodebookStream(
            seed=seed,
            n=self.n,
            alphabet_size=len(self.repro_alphabet),
            mode=self.mode,
            base=self.base,
            max_draws=self.max_draws,
            length_mode=self.length_mode,
            table=table,
        )

    def sources(self) -> list[Block]:
        alpha = Alphabet(self.source_alphabet)
        if self.source_blocks is not None:
            return [alpha.to_block(t) for t in self.source_blocks]
        return list(enumerate_blocks(self.n, alpha.size))

    def to_json(self) -> str:
        data = {
            k: v
            for k, v in self.__dict__.items()
            if v is not None
        }
        data["level"] = str(self.level)
        if self.seeds is not None:
            data["seeds"] = list(self.seeds)
        if self.source_blocks is not None:
            data["source_blocks"] = list(self.source_blocks)
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        data.pop("experiment", None)
        data.pop("output", None)
        if "level" in data:
            data["level"] = Fraction(data["level"])
        if "seeds" in data and data["seeds"] is not None:
            data["seeds"] = tuple(data["seeds"])
        if "source_blocks" in data and data["source_blocks"] is not None:
            data["source_blocks"] = tuple(data["source_blocks"])
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise PreconditionError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, Block):
        return "".join(str(s) for s in value.symbols)
    if isinstance(value, EmpiricalDistribution):
        return {
            "order": value.order,
            "n": value.n,
            "counts": {"".join(map(str, k)): v for k, v in value.counts.items()},
        }
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


@dataclass(frozen=True)
class AchievabilityRow:
    """Per-source-block statistics over all codebook seeds."""

    block: Block
    mass: Fraction
    neg_log2_mass: float
    trials: int
    escapes: int
    mean_log2_index: float
    se_log2_index: float
    index_mean_ok: bool
    dkw_sup: float
    dkw_ok: bool
    semifaithful_failures: int
    mean_actual_bits: float
    mean_theoretical_bits: float
    length_violation_fraction: float


@dataclass(frozen=True)
class AchievabilityReport:
    rows: tuple[AchievabilityRow, ...]
    dkw_eps: float
    alpha: float
    all_dkw_ok: bool
    all_index_mean_ok: bool
    all_semifaithful: bool
    length_violation_fraction: float
    config: dict
    schema_version: str = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.__dict__ | {"rows": [r.__dict__ for r in self.rows]}),
                          sort_keys=True)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(
            [
                "block",
                "mass",
                "neg_log2_mass",
                "trials",
                "escapes",
                "mean_log2_index",
                "se_log2_index",
                "index_mean_ok",
                "dkw_sup",
                "dkw_ok",
                "semifaithful_failures",
                "mean_actual_bits",
                "mean_theoretical_bits",
                "length_violation_fraction",
            ]
        )
        for r in self.rows:
            w.writerow(
                [
                    _jsonable(r.block),
                    str(r.mass),
                    r.neg_log2_mass,
                    r.trials,
                    r.escapes,
                    r.mean_log2_index,
                    r.se_log2_index,
                    r.index_mean_ok,
                    r.dkw_sup,
                    r.dkw_ok,
                    r.semifaithful_failures,
                    r.mean_actual_bits,
                    r.mean_theoretical_bits,
                    r.length_violation_fraction,
                ]
            )
        return out.getvalue()


def _achievability_chunk(cfg_json: str, seeds: list[int]):
    """Worker: first-hit histograms and round-trip failures for a seed chunk."""
    cfg = ExperimentConfig.from_json(cfg_json)
    spec = cfg.spec()
    table = build_universal_table(cfg.n, spec.repro_size, cfg.length_mode)
    sources = cfg.sources()
    budgets = [x.n * Fraction(cfg.level) for x in sources]
    hists: list[dict[int, int]] = [{} for _ in sources]
    bad = [0] * len(sources)
    for seed in seeds:
        stream = cfg.stream(seed, table)
        for si, x in enumerate(sources):
            msg = encode(x, cfg.level, spec, stream)
            key = msg.index if msg.index is not None else -1
            hists[si][key] = hists[si].get(key, 0) + 1
            xhat = decode(msg, stream)
            if distortion(x, xhat, spec) > budgets[si]:
                bad[si] += 1
    return hists, bad


def _merge_hists(parts):
    hists, bad = None, None
    for part_h, part_b in parts:
        if hists is None:
            hists = [dict(h) for h in part_h]
            bad = list(part_b)
            continue
        for i, h in enumerate(part_h):
            for k, v in h.items():
                hists[i][k] = hists[i].get(k, 0) + v
            bad[i] += part_b[i]
    return hists, bad


def _run_chunked(worker, cfg: ExperimentConfig, seeds: list[int]):
    jobs = max(1, cfg.jobs)
    if jobs == 1 or len(seeds) < 2:
        return [worker(cfg.to_json(), seeds)]
    chunk = (len(seeds) + jobs - 1) // jobs
    chunks = [seeds[i : i + chunk] for i in range(0, len(seeds), chunk)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, [cfg.to_json()] * len(chunks), chunks))


def achievability_experiment(cfg: ExperimentConfig) -> AchievabilityReport:
    """First-hit index behaviour of the codec against exact sphere masses.

    For every source block and codebook seed, records the first-hit index,
    verifies the decoded block stays within the budget, and compares the
    index statistics against the geometric law implied by the exact sphere
    mass: a uniform CDF band for the tail, and the log-mean bound.
    """
    spec = cfg.spec()
    table = build_universal_table(cfg.n, spec.repro_size, cfg.length_mode)
    sources = cfg.sources()
    masses = [sphere_mass(x, cfg.level, spec, table) for x in sources]
    for x, m in zip(sources, masses):
        if m.mass == 0:
            raise UncodableInputError(
                f"source block {x.symbols} has an empty sphere at level {cfg.level}"
            )
    seeds = cfg.seed_list()
    parts = _run_chunked(_achievability_chunk, cfg, seeds)
    hists, bad = _merge_hists(parts)

    tl_const = math.log2(cfg.n * math.log(cfg.stream(0).nominal_base) + 1)
    c_const = math.log2(math.log(cfg.stream(0).nominal_base) + 1)
    eps_band = dkw_band(len(seeds))
    rows = []
    total_viol = 0
    total_samples = 0
    for x, m, hist, nbad in zip(sources, masses, hists, bad):
        trials = sum(hist.values())
        escapes = hist.get(-1, 0)
        neg_log2 = m.neg_log2_mass()
        values = np.array([k for k in hist if k != -1], dtype=np.int64)
        counts = np.array([hist[k] for k in values], dtype=np.int64)
        logs = np.log2(values.astype(float))
        m_eff = int(counts.sum())
        mean_log = float((logs * counts).sum() / m_eff) if m_eff else math.inf
        var_log = (
            float((counts * (logs - mean_log) ** 2).sum() / m_eff) if m_eff else 0.0
        )
        se = math.sqrt(var_log / m_eff) if m_eff else 0.0
        index_ok = escapes == 0 and mean_log <= neg_log2 + 3 * se + 1e-12

        p = float(m.mass)
        max_i = int(values.max()) if m_eff else 0
        grid = np.arange(0, max_i + 1)
        emp = np.zeros(max_i + 1)
        for v, cnt in zip(values, counts):
            emp[v:] += cnt
        emp /= trials
        theo = 1.0 - (1.0 - p) ** grid
        dkw_sup = float(np.max(np.abs(emp - theo))) if max_i else abs(0.0)
        dkw_ok = dkw_sup <= eps_band

        actual = np.array(
            [1 + index_code_encode(int(v)).length for v in values], dtype=float
        )
        mean_actual = float((actual * counts).sum() / m_eff) if m_eff else math.inf
        theo_bits = logs + tl_const
        mean_theo = float((theo_bits * counts).sum() / m_eff) if m_eff else math.inf
        bound = neg_log2 + (2 + cfg.epsilon) * math.log2(cfg.n) + c_const + cfg.slack_bits
        viol = int(((theo_bits > bound) * counts).sum()) + escapes
        total_viol += viol
        total_samples += trials
        rows.append(
            AchievabilityRow(
                block=x,
                mass=m.mass,
                neg_log2_mass=neg_log2,
                trials=trials,
                escapes=escapes,
                mean_log2_index=mean_log,
                se_log2_index=se,
                index_mean_ok=index_ok,
                dkw_sup=dkw_sup,
                dkw_ok=dkw_ok,
                semifaithful_failures=nbad,
                mean_actual_bits=mean_actual,
                mean_theoretical_bits=mean_theo,
                length_violation_fraction=viol / trials if trials else 0.0,
            )
        )
    return AchievabilityReport(
        rows=tuple(rows),
        dkw_eps=eps_band,
        alpha=ALPHA,
        all_dkw_ok=all(r.dkw_ok for r in rows),
        all_index_mean_ok=all(r.index_mean_ok for r in rows),
        all_semifaithful=all(r.semifaithful_failures == 0 for r in rows),
        length_violation_fraction=total_viol / total_samples if total_samples else 0.0,
        config=json.loads(cfg.to_json()),
    )


def _ensemble_chunk(cfg_json: str, indexed_seeds: list[tuple[int, int]]):
    """Worker: per-seed coverage failure flag and clamped worst overshoot."""
    cfg = ExperimentConfig.from_json(cfg_json)
    spec = cfg.spec()
    table = build_universal_table(cfg.n, spec.repro_size, cfg.length_mode)
    sources = cfg.sources()
    masses = [sphere_mass(x, cfg.level, spec, table) for x in sources]
    base = cfg.stream(0).nominal_base
    c_const = math.log2(math.log(base) + 1)
    plus = [
        m.neg_log2_mass() + math.log2(cfg.n) + c_const for m in masses
    ]
    pad = (1 + cfg.epsilon) * math.log2(cfg.n)
    out = []
    for t, seed in indexed_seeds:
        stream = cfg.stream(seed, table)
        fail = False
        worst = -math.inf
        for x, lplus in zip(sources, plus):
            msg = encode(x, cfg.level, spec, stream)
            if msg.index is None:
                fail = True
                length = theoretical_length(cfg.max_draws, cfg.n, base).bits
            else:
                length = msg.theoretical_bits
            worst = max(worst, length - lplus - pad)
        out.append((t, fail, max(0.0, worst)))
    return out


@dataclass(frozen=True)
class EnsembleFailureReport:
    """Two-term decomposition of ensemble risk over codebook seeds."""

    coverage_failure_rate: float
    length_overshoot_mean: float
    trials: int
    per_seed_failures: int
    config: dict
    schema_version: str = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.__dict__), sort_keys=True)


def ensemble_failure_experiment(cfg: ExperimentConfig) -> EnsembleFailureReport:
    """Estimate the chance any block misses the codebook, plus length excess.

    Term one is the fraction of seeds for which some source block finds no
    codeword within the draw budget; term two is the mean over seeds of the
    worst per-block length overshoot past the padded per-block bound,
    clamped at zero.
    """
    seeds = list(enumerate(cfg.seed_list()))
    jobs = max(1, cfg.jobs)
    if jobs == 1 or len(seeds) < 2:
        parts = [_ensemble_chunk(cfg.to_json(), seeds)]
    else:
        chunk = (len(seeds) + jobs - 1) // jobs
        pieces = [seeds[i : i + chunk] for i in range(0, len(seeds), chunk)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_ensemble_chunk, [cfg.to_json()] * len(pieces), pieces))
    merged = sorted((row for part in parts for row in part), key=lambda r: r[0])
    fails = sum(1 for _, f, _ in merged if f)
    overshoot = sum(o for _, _, o in merged) / len(merged)
    return EnsembleFailureReport(
        coverage_failure_rate=fails / len(merged),
        length_overshoot_mean=overshoot,
        trials=len(merged),
        per_seed_failures=fails,
        config=json.loads(cfg.to_json()),
    )


@dataclass(frozen=True)
class ConverseExperimentReport:
    """Covering bound versus a concrete codebook and length assignment."""

    min_codebook_size: Fraction | None
    greedy_size: int
    fraction_long: float
    fraction_guarantee: float
    fraction_ok: bool
    short_count: int
    short_bound: int
    identity_ok: bool
    delta_per_symbol: float
    base_slack_per_symbol: float
    tree_nodes: int
    type_log_size_slack: float
    bound_bits: float
    config: dict
    schema_version: str = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.__dict__), sort_keys=True)


def _type_distribution(cfg: ExperimentConfig) -> EmpiricalDistribution:
    alpha = Alphabet(cfg.source_alphabet)
    chunks = cfg.n // cfg.order
    if cfg.type_counts is not None:
        counts = {}
        for text, count in cfg.type_counts.items():
            if len(text) != cfg.order:
                raise PreconditionError(f"type chunk {text!r} has the wrong order")
            counts[tuple(alpha.index(ch) for ch in text)] = int(count)
        return EmpiricalDistribution(cfg.order, cfg.n, counts)
    cells = alpha.size**cfg.order
    if chunks % cells:
        raise PreconditionError(
            "no balanced default type at this n and order; supply type_counts"
        )
    share = chunks // cells
    counts = {
        tup: share for tup in product(range(alpha.size), repeat=cfg.order)
    }
    return EmpiricalDistribution(cfg.order, cfg.n, counts)


def converse_experiment(cfg: ExperimentConfig) -> ConverseExperimentReport:
    """Check the covering bound against a greedy codebook for one type class."""
    spec = cfg.spec()
    dist = _type_distribution(cfg)
    source_class = enumerate_type_class(dist)
    cover = covering_lower_bound(source_class, cfg.level, spec)
    greedy = greedy_cover(source_class, cfg.level, spec)
    lengths = shortest_first_lengths(greedy.size)

    if cover.min_codebook_size is not None:
        threshold = math.log2(cover.min_codebook_size) - cfg.epsilon * math.log2(cfg.n)
        long_count = sum(1 for length in lengths if length >= threshold)
        fraction_long = long_count / greedy.size
    else:
        threshold = math.inf
        fraction_long = 0.0
    guarantee = 1 - 2 * cfg.n ** (-cfg.epsilon)
    scb = short_codeword_count(greedy.size, cfg.n, cfg.epsilon)
    short = sum(1 for length in lengths if length <= scb.threshold_bits)

    identity_ok = True
    if cover.best_cover_type is not None:
        repro_class = enumerate_type_class(cover.best_cover_type)
        identity_ok = double_counting_check(
            source_class, repro_class, cfg.level, spec
        ).ok

    table = build_universal_table(cfg.n, spec.repro_size, cfg.length_mode)
    rep = converse_length_bound(
        source_class.members[0], cfg.level, spec, cfg.order, cfg.epsilon, table
    )
    return ConverseExperimentReport(
        min_codebook_size=cover.min_codebook_size,
        greedy_size=greedy.size,
        fraction_long=fraction_long,
        fraction_guarantee=guarantee,
        fraction_ok=fraction_long >= guarantee,
        short_count=short,
        short_bound=scb.max_count,
        identity_ok=identity_ok,
        delta_per_symbol=rep.delta_per_symbol,
        base_slack_per_symbol=rep.base_slack_per_symbol,
        tree_nodes=rep.tree_nodes,
        type_log_size_slack=rep.type_log_size_slack,
        bound_bits=rep.bound_bits,
        config=json.loads(cfg.to_json()),
    )


def run_experiment(name: str, cfg: ExperimentConfig):
    """Dispatch by experiment name; used by the command line front end."""
    if name == "achievability":
        return achievability_experiment(cfg)
    if name == "ensemble_failure":
        return ensemble_failure_experiment(cfg)
    if name == "converse":
        return converse_experiment(cfg)
    raise PreconditionError(f"unknown experiment {name!r}")
