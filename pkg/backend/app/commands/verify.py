import argparse
import itertools
import logging
import random
from typing import List, Optional, Tuple

from pydantic import BaseModel

from app import config
from app.errors import DepthInsufficientError
from app.services.finite_oracle import OPERATIONS, max_oracle_rank, oracle_agree, random_lattice_pair
from app.services.galois_models import ModelParams, Variant, build_model
from app.services.lemmas import LEMMAS, lemma_variants, verify_lemma
from app.services.plocal import check_prime
from app.utils.emit import to_json, write_output

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 1000


class LemmaTally(BaseModel):
    lemma_id: str
    variant: str
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    failures: List[List[int]] = []

    @property
    def evaluated(self) -> int:
        return self.passed + self.failed


class OracleTally(BaseModel):
    pairs: int
    depth: int
    agreed: int = 0
    disagreed: int = 0
    depth_limited: int = 0


class VerifySummary(BaseModel):
    p: int
    lemmas: List[LemmaTally] = []
    oracle: Optional[OracleTally] = None

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.lemmas) and (self.oracle is None or self.oracle.disagreed == 0)


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Run lemma checks and oracle agreement")
    parser.add_argument("--p", type=int, default=5)
    parser.add_argument("--lemma", action="append", help="Lemma id (repeatable); default: all")
    parser.add_argument("--variant", choices=[v.value for v in Variant])
    parser.add_argument("--samples", type=int, help="Random tuples when the residue grid is too large")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--depth", type=int, default=3, help="Oracle depth k")
    parser.add_argument("--oracle-pairs", type=int, default=0, help="Random lattice pairs for the oracle")
    parser.add_argument("--emit", choices=("json", "table"), default="table")
    parser.add_argument("--output", help="Write to this file instead of stdout")
    parser.set_defaults(handler=run)


def parameter_grid(variant: Variant, p: int, samples: int, rng: random.Random) -> List[Tuple[int, ...]]:
    """Every residue tuple when there are few enough, else seeded random integer tuples."""
    arity = 3 if variant is Variant.DEG6 else 2
    if p ** arity <= EXHAUSTIVE_LIMIT:
        return list(itertools.product(range(p), repeat=arity))
    bound = p * p
    return [tuple(rng.randint(-bound, bound) for _ in range(arity)) for _ in range(samples)]


def tally_lemma(lemma_id: str, variant: Variant, p: int, grid: List[Tuple[int, ...]]) -> LemmaTally:
    tally = LemmaTally(lemma_id=lemma_id, variant=variant.value)
    for values in grid:
        params = ModelParams(variant=variant, p=p, **dict(zip("abc", values)))
        report = verify_lemma(build_model(params, checked=False), lemma_id)
        if report.passed:
            tally.passed += 1
        elif report.failed:
            tally.failed += 1
            tally.failures.append(list(values))
        else:
            tally.skipped += 1
    logger.info(f"{lemma_id} {variant.value}: {tally.passed}/{tally.evaluated} passed, {tally.skipped} skipped")
    return tally


def run_oracle(p: int, depth: int, pairs: int, rng: random.Random) -> OracleTally:
    tally = OracleTally(pairs=pairs, depth=depth)
    max_rank = max_oracle_rank(p, depth)
    for index in range(pairs):
        L1, L2 = random_lattice_pair(rng, p, max_rank)
        for op in OPERATIONS:
            try:
                agreed = oracle_agree(L1, L2, depth, op, seed=index)
            except DepthInsufficientError as e:
                logger.debug(f"Oracle pair {index} {op}: {e}")
                tally.depth_limited += 1
                continue
            if agreed:
                tally.agreed += 1
            else:
                tally.disagreed += 1
                logger.error(f"Oracle disagreement on pair {index} for {op}: {L1.as_int_rows()} / {L2.as_int_rows()}")
    return tally


def render_table(summary: VerifySummary) -> str:
    lines = []
    for t in summary.lemmas:
        status = "pass" if t.failed == 0 else "FAIL"
        lines.append(
            f"{t.lemma_id} [{t.variant}] p={summary.p}: {t.passed}/{t.evaluated} tuples agree "
            f"({t.skipped} skipped) {status}"
        )
        for values in t.failures:
            lines.append(f"  failed at {tuple(values)}")
    if summary.oracle is not None:
        o = summary.oracle
        lines.append(
            f"oracle p={summary.p} depth={o.depth}: {o.agreed}/{o.agreed + o.disagreed} checks agree "
            f"over {o.pairs} pairs ({o.depth_limited} depth-limited)"
        )
    lines.append("verify: ok" if summary.ok else "verify: FAILED")
    return "\n".join(lines) + "\n"


def run(args: argparse.Namespace) -> int:
    lemma_ids = args.lemma or list(LEMMAS)
    for lemma_id in lemma_ids:
        lemma_variants(lemma_id)
    p = check_prime(args.p)
    samples = config.verify_samples() if args.samples is None else args.samples
    seed = config.verify_seed() if args.seed is None else args.seed
    rng = random.Random(seed)

    summary = VerifySummary(p=p)
    for lemma_id in lemma_ids:
        for variant in lemma_variants(lemma_id):
            if args.variant and variant.value != args.variant:
                continue
            grid = parameter_grid(variant, p, samples, rng)
            summary.lemmas.append(tally_lemma(lemma_id, variant, p, grid))
    if args.oracle_pairs:
        summary.oracle = run_oracle(p, args.depth, args.oracle_pairs, rng)

    if args.emit == "json":
        text = to_json({**summary.model_dump(mode="json"), "ok": summary.ok})
    else:
        text = render_table(summary)
    write_output(text, args.output)
    if not summary.ok:
        logger.error("Verification failed")
        return 1
    return 0
