"""Monte Carlo failure rates, Wilson intervals and curve-crossing thresholds."""
from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import rng as rngmod
from .codes import CODE_KINDS, CodeLattice
from .decoders import Decoder
from .exgraph import ExcitationGraph
from .noise import NOISE_KINDS, model_for_effective_rate, sample_batch
from .pauli import batch_logical_class, batch_syndrome

Z95 = 1.959963984540054
CSV_COLUMNS = ["code", "distance", "noise", "p_eff", "trials", "failures", "p_fail", "ci_low", "ci_high"]
THRESHOLD_METHOD = "pairwise-crossing"


def wilson_interval(failures: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        return 0.0, 1.0
    phat = failures / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if failures == 0 else max(0.0, centre - half)
    hi = 1.0 if failures == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class CurvePoint:
    code: str
    distance: int
    noise: str
    p_eff: float
    trials: int
    failures: int

    @property
    def p_fail(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)

    @property
    def stderr(self) -> float:
        p = self.p_fail
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else 0.0

    def row(self) -> list[str]:
        lo, hi = self.ci
        return [self.code, str(self.distance), self.noise, f"{self.p_eff:.6f}", str(self.trials),
                str(self.failures), f"{self.p_fail:.8f}", f"{lo:.8f}", f"{hi:.8f}"]


def trial_stream(seed: int, lattice: CodeLattice, noise: str, p_eff: float, block: int) -> np.random.Generator:
    """Evaluation stream; independent of the decoder so decoders can share trials."""
    return rngmod.stream(seed, rngmod.SAMPLE, CODE_KINDS.index(lattice.code_kind), lattice.distance,
                         NOISE_KINDS.index(noise), int(round(p_eff * 1e9)), block)


def failure_flags(lattice: CodeLattice, decoder: Decoder, errors: np.ndarray) -> np.ndarray:
    """Per-trial failure indicators; checks that every recovery matches its syndrome."""
    syn = batch_syndrome(errors, lattice.stabilizers)
    rec = decoder.decode_batch(syn)
    if not np.array_equal(batch_syndrome(rec, lattice.stabilizers), syn):
        raise RuntimeError(f"{decoder.name} decoder returned a recovery with the wrong syndrome")
    return batch_logical_class(rec ^ errors, lattice.logical_x, lattice.logical_z) != 0


def estimate_failure(lattice: CodeLattice, graph: ExcitationGraph, decoder: Decoder, noise: str,
                     p_eff: float, trials: int, seed: int, block_size: int = 10_000) -> CurvePoint:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    model = model_for_effective_rate(noise, p_eff, lattice)
    failures = 0
    for block, start in enumerate(range(0, trials, block_size)):
        size = min(block_size, trials - start)
        errors = sample_batch(model, lattice, trial_stream(seed, lattice, noise, p_eff, block), size)
        failures += int(failure_flags(lattice, decoder, errors).sum())
    return CurvePoint(lattice.code_kind, lattice.distance, noise, float(p_eff), trials, failures)


def shared_failures(lattice: CodeLattice, decoders: Sequence[Decoder], noise: str, p_eff: float,
                    trials: int, seed: int, block_size: int = 10_000) -> np.ndarray:
    """``(len(decoders), trials)`` failure flags on one common set of errors."""
    model = model_for_effective_rate(noise, p_eff, lattice)
    out = []
    for block, start in enumerate(range(0, trials, block_size)):
        size = min(block_size, trials - start)
        errors = sample_batch(model, lattice, trial_stream(seed, lattice, noise, p_eff, block), size)
        out.append(np.stack([failure_flags(lattice, d, errors) for d in decoders]))
    return np.concatenate(out, axis=1)


def parse_p_range(text: str) -> list[float]:
    """``"a:b:step"`` (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:stop:step, got {text!r}")
        a, b, step = map(float, parts)
        if step <= 0 or b < a:
            raise ValueError(f"invalid range {text!r}")
        count = int(math.floor((b - a) / step + 1e-9)) + 1
        return [round(a + i * step, 10) for i in range(count)]
    return [float(t) for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------- thresholds


@dataclass
class ThresholdEstimate:
    p_th: float | None
    uncertainty: float | None
    crossings: list[dict] = field(default_factory=list)
    method: str = THRESHOLD_METHOD
    message: str = ""

    @property
    def found(self) -> bool:
        return self.p_th is not None


def _pair_crossing(small: list[CurvePoint], large: list[CurvePoint]):
    fs = {round(pt.p_eff, 10): pt for pt in small}
    fl = {round(pt.p_eff, 10): pt for pt in large}
    grid = sorted(set(fs) & set(fl))
    diff = [fl[p].p_fail - fs[p].p_fail for p in grid]
    found = None
    # the last switch from "larger code better" to "larger code worse"
    for i in range(len(grid) - 1):
        if (diff[i] < 0 <= diff[i + 1]) or (diff[i] <= 0 < diff[i + 1]):
            found = i
    if found is None:
        return None
    i = found
    pa, pb, da, db = grid[i], grid[i + 1], diff[i], diff[i + 1]
    x = pa + (pb - pa) * (-da) / (db - da)

    def sigma(p):
        return math.hypot((fs[p].ci[1] - fs[p].ci[0]) / (2 * Z95), (fl[p].ci[1] - fl[p].ci[0]) / (2 * Z95))

    denom = (da - db) ** 2
    dxa = (pb - pa) * (-db) / denom
    dxb = (pb - pa) * da / denom
    sx = math.hypot(dxa * sigma(pa), dxb * sigma(pb))
    return x, sx


def find_threshold(points: Sequence[CurvePoint]) -> ThresholdEstimate:
    """Mean of the crossings of adjacent-distance curves (linear interpolation)."""
    curves: dict[int, list[CurvePoint]] = defaultdict(list)
    for pt in points:
        curves[pt.distance].append(pt)
    ds = sorted(curves)
    if len(ds) < 2:
        return ThresholdEstimate(None, None, message="need at least two distances")
    crossings = []
    for a, b in zip(ds, ds[1:]):
        res = _pair_crossing(sorted(curves[a], key=lambda p: p.p_eff), sorted(curves[b], key=lambda p: p.p_eff))
        if res is not None:
            crossings.append({"distances": [a, b], "p_cross": res[0], "sigma": res[1]})
    if not crossings:
        return ThresholdEstimate(None, None, message="no crossing in range")
    xs = [c["p_cross"] for c in crossings]
    half_spread = (max(xs) - min(xs)) / 2
    prop = math.sqrt(sum(c["sigma"] ** 2 for c in crossings)) / len(crossings)
    return ThresholdEstimate(float(np.mean(xs)), math.hypot(half_spread, prop), crossings)


# ---------------------------------------------------------------- sweeps and output


def run_sweep(code: str, noise: str, distances: Sequence[int], p_effs: Sequence[float], trials: int, seed: int,
              decoder_for: Callable[[CodeLattice, ExcitationGraph], Decoder], progress=None) -> list[CurvePoint]:
    from .codes import build_lattice
    from .exgraph import build_graph

    points = []
    for d in distances:
        lat = build_lattice(code, d)
        graph = build_graph(lat)
        decoder = decoder_for(lat, graph)
        for p in p_effs:
            pt = estimate_failure(lat, graph, decoder, noise, p, trials, seed)
            points.append(pt)
            if progress is not None:
                progress(pt)
    return points


def format_csv(points: Sequence[CurvePoint], estimate: ThresholdEstimate | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for pt in points:
        w.writerow(pt.row())
    if estimate is not None:
        if estimate.found:
            buf.write(f"# crossing p_th={estimate.p_th:.6f} uncertainty={estimate.uncertainty:.6f} "
                      f"method={estimate.method}\n")
        else:
            buf.write(f"# crossing none: {estimate.message}\n")
    return buf.getvalue()


def read_csv(text: str) -> list[CurvePoint]:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    out = []
    for rec in csv.DictReader(rows):
        out.append(CurvePoint(rec["code"], int(rec["distance"]), rec["noise"], float(rec["p_eff"]),
                              int(rec["trials"]), int(rec["failures"])))
    return out


def format_json(points: Sequence[CurvePoint], estimate: ThresholdEstimate | None = None) -> str:
    doc = {"points": []}
    for pt in points:
        lo, hi = pt.ci
        rec = asdict(pt)
        rec.update(p_fail=pt.p_fail, ci_low=lo, ci_high=hi)
        doc["points"].append(rec)
    if estimate is not None:
        doc["threshold"] = {"p_th": estimate.p_th, "uncertainty": estimate.uncertainty,
                            "method": estimate.method, "crossings": estimate.crossings}
        if not estimate.found:
            doc["threshold"]["message"] = estimate.message
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
