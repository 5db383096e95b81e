"""Throughput benchmark: documents per second, one document at a time."""

import statistics
import time
from dataclasses import dataclass
from typing import Sequence

from kpgen.datasets import Document
from kpgen.errors import DataError
from kpgen.pipeline import KeyphrasePipeline, PipelineConfig


@dataclass(frozen=True)
class BenchResult:
    neighbors: int
    doc_count: int
    repetitions: int
    throughput_mean: float
    throughput_std: float
    seconds_per_doc: float
    total_seconds: float
    per_repetition: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "neighbors": self.neighbors,
            "doc_count": self.doc_count,
            "repetitions": self.repetitions,
            "throughput_mean": self.throughput_mean,
            "throughput_std": self.throughput_std,
            "seconds_per_doc": self.seconds_per_doc,
            "total_seconds": self.total_seconds,
        }


def bench_throughput(
    docs: Sequence[Document],
    pipeline: KeyphrasePipeline,
    config: PipelineConfig | None = None,
    repetitions: int = 3,
    warmup: int = 1,
) -> BenchResult:
    """Time generation over ``docs`` sequentially (batch size 1).

    The index and model are assumed loaded; ``warmup`` untimed passes over
    the first documents warm caches before measurement.
    """
    if not docs:
        raise DataError("benchmark needs at least one document")
    if repetitions < 1:
        raise DataError("benchmark needs at least one repetition")
    cfg = config or pipeline.config

    for doc in docs[: min(len(docs), max(warmup, 0))]:
        pipeline.generate(doc, cfg)

    throughputs = []
    total = 0.0
    for _ in range(repetitions):
        start = time.perf_counter()
        for doc in docs:
            pipeline.generate(doc, cfg)
        elapsed = time.perf_counter() - start
        total += elapsed
        throughputs.append(len(docs) / elapsed)

    mean = statistics.fmean(throughputs)
    std = statistics.pstdev(throughputs) if len(throughputs) > 1 else 0.0
    return BenchResult(
        neighbors=cfg.neighbors,
        doc_count=len(docs),
        repetitions=repetitions,
        throughput_mean=mean,
        throughput_std=std,
        seconds_per_doc=total / (repetitions * len(docs)),
        total_seconds=total,
        per_repetition=tuple(throughputs),
    )
