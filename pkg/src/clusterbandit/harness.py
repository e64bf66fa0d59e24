"""Experiment runner: configs, presets, seed fan-out, and result export.

An experiment is a set of instance variants, a set of policies, a horizon,
and a list of seeds. For every (variant, seed) the instance is generated
from the seed's instance sub-stream, so every policy sees the identical
instance realization (and, for contextual runs, the identical context
sequence). Jobs fan out over (variant, policy, seed) across worker
processes; aggregation sorts on (variant, policy, seed) first, so output
is byte-identical regardless of scheduling.

Results export to CSV (one row per logged step), JSON (config plus
summaries, round-trippable), and SVG (mean regret curve per policy with a
shaded +/-1 standard deviation band).
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import (
    TraceSummary,
    aggregate_curves,
    cluster_stats,
    hts_instance_bound,
    lai_robbins_lower,
    tsc_instance_bound,
    tsc_minimax_bound,
)
from .contextual import CONTEXTUAL_POLICY_KEYS, ContextualInstance, make_contextual_policy
from .core import rng_streams
from .instances import build_instance, gen_context
from .policies import POLICY_KEYS, make_policy
from .simulate import simulate, simulate_contextual

__all__ = [
    "ConfigError",
    "PolicySpec",
    "InstanceVariant",
    "ExperimentConfig",
    "RunRow",
    "ExperimentResult",
    "run_experiment",
    "export_result",
    "load_results_json",
    "preset",
    "preset_names",
    "logging_grid",
]

FULL_RESOLUTION_LIMIT = 10_000


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolicySpec:
    """One policy entry: key, hyperparameters, optional variant filter."""

    key: str
    params: dict = field(default_factory=dict)
    variants: tuple[str, ...] | None = None
    label: str | None = None

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.params:
            inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
            return f"{self.key}({inner})"
        return self.key

    def runs_on(self, variant_name: str) -> bool:
        return self.variants is None or variant_name in self.variants

    def to_json(self) -> dict:
        doc: dict = {"key": self.key}
        if self.params:
            doc["params"] = dict(self.params)
        if self.variants is not None:
            doc["variants"] = list(self.variants)
        if self.label is not None:
            doc["label"] = self.label
        return doc


@dataclass(frozen=True)
class InstanceVariant:
    """Named instance spec; one experiment id per variant."""

    name: str
    spec: dict

    def to_json(self) -> dict:
        return {"name": self.name, "spec": self.spec}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    variants: tuple[InstanceVariant, ...]
    policies: tuple[PolicySpec, ...]
    horizon: int
    seeds: tuple[int, ...]
    stride: int | None = None
    bounds: bool = False
    eps: float = 0.1
    context_kind: str = "uniform"

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigError(f"horizon: must be >= 1, got {self.horizon}")
        if self.context_kind not in ("uniform", "gaussian"):
            raise ConfigError(
                f"context_kind: unknown distribution '{self.context_kind}' (uniform, gaussian)"
            )
        if not self.policies:
            raise ConfigError("policies: need at least one policy")
        if not self.seeds:
            raise ConfigError("seeds: need at least one seed")
        if not self.variants:
            raise ConfigError("instances: need at least one instance spec")
        if self.stride is not None and self.stride < 1:
            raise ConfigError(f"stride: must be >= 1, got {self.stride}")
        known = set(POLICY_KEYS) | set(CONTEXTUAL_POLICY_KEYS)
        for p in self.policies:
            if p.key not in known:
                raise ConfigError(
                    f"policies: unknown policy key '{p.key}'; valid keys: {sorted(known)}"
                )
        labels = [p.name for p in self.policies]
        if len(set(labels)) != len(labels):
            raise ConfigError("policies: duplicate policy labels; set explicit labels")
        names = [v.name for v in self.variants]
        if len(set(names)) != len(names):
            raise ConfigError("instances: duplicate variant names")

    def experiment_id(self, variant: str) -> str:
        return f"{self.name}/{variant}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "horizon": self.horizon,
            "seeds": list(self.seeds),
            "stride": self.stride,
            "bounds": self.bounds,
            "eps": self.eps,
            "context_kind": self.context_kind,
            "policies": [p.to_json() for p in self.policies],
            "instances": [v.to_json() for v in self.variants],
        }

    @staticmethod
    def from_json(doc: dict) -> "ExperimentConfig":
        try:
            seeds = _parse_seeds(doc.get("seeds"))
            policies = tuple(_parse_policy(p) for p in doc.get("policies", []))
            variants = _parse_variants(doc)
            return ExperimentConfig(
                name=str(doc.get("name", "experiment")),
                variants=variants,
                policies=policies,
                horizon=int(doc.get("horizon", 0)),
                seeds=seeds,
                stride=None if doc.get("stride") is None else int(doc["stride"]),
                bounds=bool(doc.get("bounds", False)),
                eps=float(doc.get("eps", 0.1)),
                context_kind=str(doc.get("context_kind", "uniform")),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid config document: {exc}") from exc


def _parse_seeds(raw) -> tuple[int, ...]:
    if raw is None:
        raise ConfigError("seeds: missing")
    if isinstance(raw, dict):
        base, count = int(raw.get("base", 0)), int(raw.get("count", 0))
        if count < 1:
            raise ConfigError("seeds.count: must be >= 1")
        return tuple(range(base, base + count))
    return tuple(int(s) for s in raw)


def _parse_policy(doc: dict) -> PolicySpec:
    if "key" not in doc:
        raise ConfigError("policies: entry missing 'key'")
    return PolicySpec(
        key=str(doc["key"]),
        params=dict(doc.get("params", {})),
        variants=None if doc.get("variants") is None else tuple(doc["variants"]),
        label=doc.get("label"),
    )


def _parse_variants(doc: dict) -> tuple[InstanceVariant, ...]:
    if "instances" in doc:
        return tuple(
            InstanceVariant(name=str(v.get("name", f"v{i}")), spec=dict(v["spec"]))
            for i, v in enumerate(doc["instances"])
        )
    if "instance" in doc:
        return (InstanceVariant(name="default", spec=dict(doc["instance"])),)
    raise ConfigError("instances: missing ('instance' or 'instances')")


def logging_grid(horizon: int, stride: int | None = None) -> np.ndarray:
    """Logged step indices: every ``stride`` steps plus the final step.

    The default stride is 1 up to a 10^4 horizon and 10 beyond it.
    """
    if stride is None:
        stride = 1 if horizon <= FULL_RESOLUTION_LIMIT else 10
    ts = np.arange(stride, horizon + 1, stride, dtype=np.int64)
    if ts.size == 0 or ts[-1] != horizon:
        ts = np.append(ts, horizon)
    return ts


# ---------------------------------------------------------------------------
# Job execution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunRow:
    """Logged curve of one (variant, policy, seed) simulation."""

    variant: str
    policy: str
    seed: int
    ts: np.ndarray
    regret: np.ndarray
    top_counts: np.ndarray | None

    @property
    def final_regret(self) -> float:
        return float(self.regret[-1])


def _run_job(payload: tuple) -> RunRow:
    variant_name, spec, key, params, label, seed, horizon, stride, context_kind = payload
    streams = rng_streams(seed)
    instance = build_instance(spec, streams.instance)
    try:
        if isinstance(instance, ContextualInstance):
            if key not in CONTEXTUAL_POLICY_KEYS:
                raise ConfigError(
                    f"policies: '{key}' is not a contextual policy but variant "
                    f"'{variant_name}' is a contextual instance"
                )
            policy = make_contextual_policy(key, instance, params)
            contexts = np.stack(
                [gen_context(instance.dim, streams.context, context_kind) for _ in range(horizon)]
            )
            trace = simulate_contextual(
                instance, policy, horizon, streams.simulation, contexts=contexts, seed=seed
            )
        else:
            if key not in POLICY_KEYS:
                raise ConfigError(
                    f"policies: '{key}' is not a non-contextual policy but variant "
                    f"'{variant_name}' is a Bernoulli instance"
                )
            policy = make_policy(key, instance, params)
            trace = simulate(instance, policy, horizon, streams.simulation, seed=seed)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"policies: '{label}' on variant '{variant_name}': {exc}") from exc

    ts = logging_grid(horizon, stride)
    top = None
    if trace.paths is not None:
        top = np.bincount(trace.paths[:, 0])
    return RunRow(
        variant=variant_name,
        policy=label,
        seed=seed,
        ts=ts,
        regret=trace.cum_regret[ts - 1].copy(),
        top_counts=top,
    )


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolicySummary:
    experiment_id: str
    variant: str
    policy: str
    ts: np.ndarray
    summary: TraceSummary

    def to_json(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "policy": self.policy,
            "n_seeds": self.summary.n,
            "final_mean": self.summary.final_mean,
            "final_std": self.summary.final_std,
            "ts": self.ts.tolist(),
            "mean_curve": self.summary.mean_curve.tolist(),
            "std_curve": self.summary.std_curve.tolist(),
        }


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    rows: tuple[RunRow, ...]
    summaries: tuple[PolicySummary, ...]
    bounds: tuple[dict, ...] = ()

    def summary_for(self, variant: str, policy: str) -> PolicySummary:
        for s in self.summaries:
            if s.variant == variant and s.policy == policy:
                return s
        raise KeyError(f"no summary for ({variant!r}, {policy!r})")

    def rows_for(self, variant: str, policy: str) -> list[RunRow]:
        return [r for r in self.rows if r.variant == variant and r.policy == policy]

    def final_regrets(self, variant: str, policy: str) -> np.ndarray:
        return np.asarray([r.final_regret for r in self.rows_for(variant, policy)])

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "summaries": [s.to_json() for s in self.summaries],
            "bounds": list(self.bounds),
        }


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all (variant, policy, seed) jobs and aggregate per policy."""
    jobs = [
        (v.name, v.spec, p.key, p.params, p.name, seed, config.horizon, config.stride,
         config.context_kind)
        for v in config.variants
        for p in config.policies
        if p.runs_on(v.name)
        for seed in config.seeds
    ]
    if not jobs:
        raise ConfigError("policies: variant filters leave no (variant, policy) pairs")
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_run_job(j) for j in jobs]
    rows.sort(key=lambda r: (r.variant, r.policy, r.seed))

    summaries = []
    for v in config.variants:
        for p in config.policies:
            if not p.runs_on(v.name):
                continue
            group = [r for r in rows if r.variant == v.name and r.policy == p.name]
            summaries.append(
                PolicySummary(
                    experiment_id=config.experiment_id(v.name),
                    variant=v.name,
                    policy=p.name,
                    ts=group[0].ts,
                    summary=aggregate_curves(np.stack([r.regret for r in group])),
                )
            )

    bounds = _bound_rows(config) if config.bounds else ()
    return ExperimentResult(
        config=config, rows=tuple(rows), summaries=tuple(summaries), bounds=bounds
    )


def _bound_rows(config: ExperimentConfig) -> tuple[dict, ...]:
    """Per-variant theoretical reference values, averaged over seeds."""
    out: list[dict] = []
    T = float(config.horizon)
    for v in config.variants:
        acc: dict[str, list[float]] = {}
        dominance_ok = 0
        applicable = 0
        for seed in config.seeds:
            streams = rng_streams(seed)
            instance = build_instance(v.spec, streams.instance)
            if isinstance(instance, ContextualInstance):
                break
            if instance.clustering is not None:
                applicable += 1
                stats = cluster_stats(instance)
                ib = tsc_instance_bound(stats, T, config.eps)
                dominance_ok += int(ib.dominance_ok)
                acc.setdefault("tsc_instance", []).append(ib.leading)
                acc.setdefault("tsc_minimax", []).append(tsc_minimax_bound(stats, T))
                acc.setdefault("lai_robbins_lower", []).append(lai_robbins_lower(stats, T).leading)
            elif instance.tree is not None:
                applicable += 1
                ib = hts_instance_bound(instance, T, config.eps)
                dominance_ok += int(ib.dominance_ok)
                acc.setdefault("hts_instance", []).append(ib.leading)
        for name, values in sorted(acc.items()):
            arr = np.asarray(values)
            out.append(
                {
                    "experiment_id": config.experiment_id(v.name),
                    "bound": name,
                    "mean_value_at_horizon": float(arr.mean()) if np.isfinite(arr).all() else math.inf,
                    "n_seeds": int(arr.size),
                    "dominance_ok_fraction": dominance_ok / applicable if applicable else None,
                    "note": "asymptotic leading term; o(log T) remainder not included",
                }
            )
    return tuple(out)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def write_csv(result: ExperimentResult, path: Path) -> None:
    lines = ["experiment_id,policy,seed,t,cumulative_regret"]
    for row in result.rows:
        eid = result.config.experiment_id(row.variant)
        for t, value in zip(row.ts, row.regret):
            lines.append(f"{eid},{row.policy},{row.seed},{int(t)},{float(value)!r}")
    path.write_text("\n".join(lines) + "\n")


def write_json(result: ExperimentResult, path: Path) -> None:
    path.write_text(json.dumps(result.to_json(), indent=2) + "\n")


def load_results_json(path: Path) -> dict:
    """Re-import an exported JSON document."""
    return json.loads(Path(path).read_text())


_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


def _svg_document(title: str, summaries: Sequence[PolicySummary]) -> str:
    width, height = 860.0, 520.0
    ml, mr, mt, mb = 70.0, 190.0, 40.0, 50.0
    pw, ph = width - ml - mr, height - mt - mb

    t_max = max(float(s.ts[-1]) for s in summaries)
    y_max = max(float((s.summary.mean_curve + s.summary.std_curve).max()) for s in summaries)
    y_max = max(y_max, 1e-9)

    def sx(t: float) -> float:
        return ml + pw * t / t_max

    def sy(y: float) -> float:
        return mt + ph * (1.0 - y / y_max)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<line x1="{ml:.1f}" y1="{mt + ph:.1f}" x2="{ml + pw:.1f}" y2="{mt + ph:.1f}" stroke="black"/>',
        f'<line x1="{ml:.1f}" y1="{mt:.1f}" x2="{ml:.1f}" y2="{mt + ph:.1f}" stroke="black"/>',
        f'<text x="{ml + pw / 2:.1f}" y="{height - 12:.1f}" text-anchor="middle" font-size="13">t</text>',
        f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {mt + ph / 2:.1f})">cumulative regret</text>',
        f'<text x="{ml + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        t_tick, y_tick = frac * t_max, frac * y_max
        parts.append(
            f'<text x="{sx(t_tick):.1f}" y="{mt + ph + 16:.1f}" text-anchor="middle" '
            f'font-size="11">{t_tick:.0f}</text>'
        )
        parts.append(
            f'<text x="{ml - 6:.1f}" y="{sy(y_tick) + 4:.1f}" text-anchor="end" '
            f'font-size="11">{y_tick:.1f}</text>'
        )

    for i, s in enumerate(summaries):
        color = _PALETTE[i % len(_PALETTE)]
        ts = s.ts.astype(float)
        mean, std = s.summary.mean_curve, s.summary.std_curve
        upper = [f"{sx(t):.2f},{sy(min(m + d, y_max)):.2f}" for t, m, d in zip(ts, mean, std)]
        lower = [
            f"{sx(t):.2f},{sy(max(m - d, 0.0)):.2f}"
            for t, m, d in zip(ts[::-1], mean[::-1], std[::-1])
        ]
        parts.append(
            f'<polygon class="band" data-policy="{s.policy}" fill="{color}" '
            f'fill-opacity="0.15" stroke="none" points="{" ".join(upper + lower)}"/>'
        )
        points = " ".join(f"{sx(t):.2f},{sy(m):.2f}" for t, m in zip(ts, mean))
        parts.append(
            f'<polyline class="mean" data-policy="{s.policy}" fill="none" '
            f'stroke="{color}" stroke-width="1.6" points="{points}"/>'
        )
        ly = mt + 16 + 18 * i
        parts.append(
            f'<line x1="{ml + pw + 12:.1f}" y1="{ly:.1f}" x2="{ml + pw + 36:.1f}" '
            f'y2="{ly:.1f}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{ml + pw + 42:.1f}" y="{ly + 4:.1f}" font-size="12">{s.policy}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def write_svgs(result: ExperimentResult, out_dir: Path) -> list[Path]:
    paths = []
    for v in result.config.variants:
        group = [s for s in result.summaries if s.variant == v.name]
        if not group:
            continue
        eid = result.config.experiment_id(v.name)
        doc = _svg_document(eid, group)
        path = out_dir / f"{_safe_name(result.config.name)}__{_safe_name(v.name)}.svg"
        path.write_text(doc + "\n")
        paths.append(path)
    return paths


def _safe_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "-" for c in name)


def export_result(
    result: ExperimentResult, out_dir: Path | str, formats: Sequence[str] = ("csv", "json")
) -> list[Path]:
    """Write the requested formats into ``out_dir`` and return the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    base = _safe_name(result.config.name)
    for fmt in formats:
        if fmt == "csv":
            path = out_dir / f"{base}.csv"
            write_csv(result, path)
            written.append(path)
        elif fmt == "json":
            path = out_dir / f"{base}.json"
            write_json(result, path)
            written.append(path)
        elif fmt == "svg":
            written.extend(write_svgs(result, out_dir))
        else:
            raise ConfigError(f"format: unknown export format '{fmt}' (csv, json, svg)")
    return written


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _sd_spec(n: int, k: int, a_star: int, w: float, d: float) -> dict:
    return {
        "kind": "strong_dominance",
        "n_arms": n,
        "n_suboptimal_clusters": k,
        "optimal_cluster_size": a_star,
        "optimal_width": w,
        "separation": d,
    }


def _policies(*keys: str, **kw) -> list[dict]:
    return [{"key": k, **kw} for k in keys]


def _preset_docs() -> dict[str, dict]:
    docs: dict[str, dict] = {}
    docs["fig-d-sweep"] = {
        "name": "fig-d-sweep",
        "horizon": 3000,
        "seeds": {"base": 1000, "count": 50},
        "policies": _policies("ts", "tsc"),
        "instances": [
            {"name": f"d={d}", "spec": _sd_spec(100, 10, 10, 0.1, d)}
            for d in (0.05, 0.1, 0.2, 0.3)
        ],
    }
    docs["fig-w-sweep"] = {
        "name": "fig-w-sweep",
        "horizon": 3000,
        "seeds": {"base": 1100, "count": 50},
        "policies": _policies("ts", "tsc"),
        "instances": [
            {"name": f"w={w}", "spec": _sd_spec(100, 10, 10, w, 0.1)}
            for w in (0.0, 0.1, 0.2, 0.3)
        ],
    }
    docs["fig-n-sweep"] = {
        "name": "fig-n-sweep",
        "horizon": 3000,
        "seeds": {"base": 1200, "count": 50},
        "policies": _policies("ts", "tsc"),
        "instances": [
            {"name": f"N={n}", "spec": _sd_spec(n, int(math.isqrt(n)), int(math.isqrt(n)), 0.1, 0.1)}
            for n in (25, 100, 400)
        ],
    }
    docs["fig-k-sweep"] = {
        "name": "fig-k-sweep",
        "horizon": 3000,
        "seeds": {"base": 1300, "count": 50},
        "policies": _policies("ts", "tsc"),
        "instances": [
            {"name": f"K={k}", "spec": _sd_spec(100, k, 10, 0.1, 0.1)}
            for k in (2, 5, 10, 20, 45)
        ],
    }
    docs["fig-a-sweep"] = {
        "name": "fig-a-sweep",
        "horizon": 3000,
        "seeds": {"base": 1400, "count": 50},
        "policies": _policies("ts", "tsc"),
        "instances": [
            {"name": f"A={a}", "spec": _sd_spec(100, 10, a, 0.1, 0.1)}
            for a in (2, 5, 10, 25, 50)
        ],
    }
    docs["fig-depth"] = {
        "name": "fig-depth",
        "horizon": 3000,
        "seeds": {"base": 1500, "count": 50},
        "policies": _policies("hts"),
        "instances": [
            {"name": f"L={lv}", "spec": {"kind": "sorted_tree", "n_arms": 256, "levels": lv}}
            for lv in (0, 1, 2, 4, 8)
        ],
    }
    docs["kmeans-small"] = {
        "name": "kmeans-small",
        "horizon": 3000,
        "seeds": {"base": 1600, "count": 100},
        "policies": _policies("ts", "tsc", "ucb1", "ucbc", "tsmax"),
        "instances": [
            {
                "name": "N100-K10",
                "spec": {"kind": "kmeans", "n_arms": 100, "n_clusters": 10, "reward_fn": "sin-product"},
            }
        ],
    }
    docs["kmeans-large"] = {
        "name": "kmeans-large",
        "horizon": 3000,
        "seeds": {"base": 1700, "count": 100},
        "policies": _policies("ts", "tsc", "ucb1", "ucbc", "tsmax"),
        "instances": [
            {
                "name": "N1000-K32",
                "spec": {"kind": "kmeans", "n_arms": 1000, "n_clusters": 32, "reward_fn": "sin-product"},
            }
        ],
    }
    docs["hts-uct"] = {
        "name": "hts-uct",
        "horizon": 3000,
        "seeds": {"base": 1800, "count": 100},
        "policies": [
            {"key": "tsc", "variants": ["L1"]},
            {"key": "hts", "variants": ["L2", "L3"]},
            {"key": "uct", "variants": ["L2", "L3"]},
        ],
        "instances": [
            {
                "name": "L1",
                "spec": {"kind": "kmeans", "n_arms": 5000, "n_clusters": 15, "reward_fn": "sin-product"},
            },
            {
                "name": "L2",
                "spec": {"kind": "kmeans_tree", "n_arms": 5000, "branching": 15, "depth": 2, "reward_fn": "sin-product"},
            },
            {
                "name": "L3",
                "spec": {"kind": "kmeans_tree", "n_arms": 5000, "branching": 15, "depth": 3, "reward_fn": "sin-product"},
            },
        ],
    }
    for preset_name, (k, n, eps_val, base) in {
        "ctx-small": (20, 400, 0.5, 1900),
        "ctx-large-eps05": (30, 900, 0.5, 2000),
        "ctx-large-eps01": (30, 900, 0.1, 2100),
    }.items():
        docs[preset_name] = {
            "name": preset_name,
            "horizon": 2000,
            "seeds": {"base": base, "count": 25},
            "policies": [
                {"key": "lints", "params": {"v": 1.0}},
                {"key": "lintsc", "params": {"v": 1.0}},
                {"key": "linucb", "params": {"alpha": 2.0}},
                {"key": "linucbc", "params": {"alpha": 2.0}},
            ],
            "instances": [
                {
                    "name": f"k{k}-n{n}-eps{eps_val}",
                    "spec": {"kind": "contextual", "n_arms": n, "n_clusters": k, "dim": 5, "epsilon": eps_val},
                }
            ],
        }
    docs["appendix-2d"] = {
        "name": "appendix-2d",
        "horizon": 20000,
        "seeds": {"base": 2200, "count": 25},
        "policies": [
            {"key": "tsc", "variants": ["kmeans-K20"]},
            {"key": "hts", "variants": ["agglomerative"]},
            {"key": "uct", "variants": ["agglomerative"]},
        ],
        "instances": [
            {
                "name": "kmeans-K20",
                "spec": {"kind": "kmeans", "n_arms": 500, "n_clusters": 20, "reward_fn": "bump-2d"},
            },
            {
                "name": "agglomerative",
                "spec": {"kind": "agglomerative", "n_arms": 500, "reward_fn": "bump-2d"},
            },
        ],
    }
    docs["appendix-gaussian"] = {
        "name": "appendix-gaussian",
        "horizon": 25000,
        "seeds": {"base": 2300, "count": 25},
        "policies": [
            {"key": "tsc", "variants": ["kmeans-K5"]},
            {"key": "hts", "variants": ["agglomerative"]},
            {"key": "uct", "variants": ["agglomerative"]},
        ],
        "instances": [
            {
                "name": "kmeans-K5",
                "spec": {"kind": "kmeans", "n_arms": 50, "n_clusters": 5, "reward_fn": "gaussian-mix-1d"},
            },
            {
                "name": "agglomerative",
                "spec": {"kind": "agglomerative", "n_arms": 50, "reward_fn": "gaussian-mix-1d"},
            },
        ],
    }
    docs["appendix-uniform"] = {
        "name": "appendix-uniform",
        "horizon": 3000,
        "seeds": {"base": 2400, "count": 25},
        "policies": _policies("ts", "tsc"),
        "instances": [
            {"name": "N50-K10", "spec": {"kind": "uniform", "n_arms": 50, "n_clusters": 10}}
        ],
    }
    return docs


def preset_names() -> list[str]:
    return sorted(_preset_docs())


def preset(name: str) -> ExperimentConfig:
    """Experiment configuration of a named preset suite."""
    docs = _preset_docs()
    if name not in docs:
        raise ConfigError(
            f"preset: unknown preset '{name}'; valid presets: {', '.join(sorted(docs))}"
        )
    return ExperimentConfig.from_json(docs[name])
