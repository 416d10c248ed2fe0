"""Policy sweeps over Zipf skewness and radius, CSV output and charts."""
from __future__ import annotations

import csv
import io
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import analytic
from .centrality import centrality, tier_partition
from .cost import DEFAULT_ORIGIN_COST, expected_cost, monte_carlo_cost, tier_averaged_cost
from .demand import DEFAULT_CATALOG_SIZE, zipf_popularity
from .exceptions import ConfigError, InvalidParameterError
from .placement import ASCENDING, DESCENDING, algorithm1, place_by_centrality, place_greedy
from .topology import (
    UserAttachment,
    boundary_midpoint_user,
    build_lattice,
    build_regular_tree,
    leaf_user,
    load_edge_list,
)

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "LCHP_OUTPUT_DIR"
CSV_COLUMNS = ("policy", "topology", "h", "psi", "c_o", "in_network", "origin_coeff", "total",
               "stderr", "evaluator")
DEFAULT_PSI = tuple(round(0.2 * k, 1) for k in range(1, 11))
EVALUATORS = ("analytic", "simulated", "both", "montecarlo")
KNOWN_POLICIES = ("LCHP", "HCHP", "greedy", "algorithm1")


@dataclass(frozen=True)
class ScenarioConfig:
    topology: str = "grid"
    n: int | None = None
    arity: int = 2
    depth: int | None = None
    edgelist: str | None = None
    user: int | None = None
    h: tuple = (2, 3)
    psi: tuple = DEFAULT_PSI
    N: int = DEFAULT_CATALOG_SIZE
    c_o: float = DEFAULT_ORIGIN_COST
    policies: tuple = ("LCHP", "HCHP")
    evaluator: str = "analytic"
    metric: str = "ccc"
    seed: int = 0
    mc_requests: int = 100_000
    workers: int = 1
    output: str | None = None

    def validate(self) -> "ScenarioConfig":
        if self.topology not in ("grid", "tree", "edgelist"):
            raise ConfigError(f"expected grid, tree or edgelist, got {self.topology!r}", "topology")
        if self.topology == "edgelist":
            if not self.edgelist:
                raise ConfigError("edgelist topology needs a file", "edgelist")
            if not Path(self.edgelist).is_file():
                raise ConfigError(f"file not found: {self.edgelist}", "edgelist")
            if self.evaluator in ("analytic", "both"):
                raise ConfigError("no closed form for edge-list graphs", "evaluator")
        if not self.h or any(h < 1 for h in self.h):
            raise ConfigError("every radius must be >= 1", "h")
        if not self.psi or any(p <= 0 for p in self.psi):
            raise ConfigError("every skewness must be > 0", "psi")
        if self.N < 1:
            raise ConfigError("catalog size must be >= 1", "N")
        if not self.policies:
            raise ConfigError("at least one policy is required", "policies")
        for p in self.policies:
            if p not in KNOWN_POLICIES:
                raise ConfigError(f"unknown policy {p!r}", "policies")
            if p == "algorithm1" and self.evaluator in ("analytic", "both"):
                raise ConfigError("algorithm1 has no closed form; use simulated", "evaluator")
        if self.evaluator not in EVALUATORS:
            raise ConfigError(f"expected one of {EVALUATORS}", "evaluator")
        if self.workers < 1:
            raise ConfigError("must be >= 1", "workers")
        if self.mc_requests < 1:
            raise ConfigError("must be >= 1", "mc_requests")
        return self


_LIST_FIELDS = {"h": int, "psi": float, "policies": str}
_SCALAR_FIELDS = {"n": int, "arity": int, "depth": int, "user": int, "N": int, "c_o": float,
                  "seed": int, "mc_requests": int, "workers": int}


def _coerce(key: str, value: str):
    try:
        if key in _LIST_FIELDS:
            kind = _LIST_FIELDS[key]
            return tuple(kind(item.strip()) for item in value.split(",") if item.strip())
        if key in _SCALAR_FIELDS:
            if value.strip().lower() in ("", "none"):
                return None
            return _SCALAR_FIELDS[key](value)
    except ValueError:
        raise ConfigError(f"cannot parse {value!r}", key) from None
    return value.strip()


def parse_config(text: str, overrides=None) -> ScenarioConfig:
    """Read a flat ``key = value`` file; ``overrides`` (a dict of strings) wins."""
    names = {f.name for f in fields(ScenarioConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value", key or None)
        if key not in names:
            raise ConfigError(f"line {lineno}: unknown key", key)
        values[key] = _coerce(key, value)
    for key, value in (overrides or {}).items():
        if key not in names:
            raise ConfigError("unknown key", key)
        values[key] = _coerce(key, value) if isinstance(value, str) else value
    return ScenarioConfig(**values).validate()


def load_config(path, overrides=None) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(str(exc), "config") from None
    return parse_config(text, overrides)


@dataclass
class _Scene:
    label: str
    topology: object
    user: UserAttachment


def _scene(config: ScenarioConfig) -> _Scene:
    h_max = max(config.h)
    if config.topology == "grid":
        # the closed forms ignore corners; a side of 4h+1 keeps them out of CCC tiers
        n = config.n if config.n is not None else 4 * h_max + 1
        t = build_lattice(n)
        user = UserAttachment(config.user) if config.user is not None else boundary_midpoint_user(t)
        return _Scene(f"grid{n}", t, user)
    if config.topology == "tree":
        depth = config.depth if config.depth is not None else h_max + 2
        t = build_regular_tree(config.arity, depth)
        user = UserAttachment(config.user) if config.user is not None else leaf_user(t)
        return _Scene(f"tree{config.arity}x{depth}", t, user)
    with open(config.edgelist) as fh:
        t = load_edge_list(fh)
    user = UserAttachment(config.user if config.user is not None else 0)
    return _Scene(Path(config.edgelist).stem, t, user)


def _evaluators(config):
    if config.evaluator == "both":
        return ("analytic", "simulated")
    return (config.evaluator,)


def _evaluate(config, scene, policy, h, psi, evaluator):
    pop = zipf_popularity(config.N, psi)
    t, user = scene.topology, scene.user
    if evaluator == "analytic":
        if config.topology == "grid":
            return analytic.grid_cost(policy, h, pop)
        return analytic.tree_cost(policy, h, pop)
    if evaluator == "simulated":
        if policy in ("LCHP", "HCHP"):
            tiers = tier_partition(centrality(t, config.metric, h=h))
            order = ASCENDING if policy == "LCHP" else DESCENDING
            return tier_averaged_cost(t, tiers, order, user, h, pop)
        return expected_cost(t, _placement(config, t, user, policy, h), user, h, pop)
    seed = _cell_seed(config.seed, policy, h, psi)
    pl = _placement(config, t, user, policy, h)
    return monte_carlo_cost(t, pl, user, h, pop, config.c_o, config.mc_requests, seed)


def _placement(config, t, user, policy, h):
    if policy == "greedy":
        return place_greedy(t, user, config.N, h)
    if policy == "algorithm1":
        return algorithm1(t, config.N, h)
    order = ASCENDING if policy == "LCHP" else DESCENDING
    return place_by_centrality(t, config.N, h, order, metric=config.metric)


def _cell_seed(seed, policy, h, psi):
    # stable across runs and processes, unlike hash()
    tag = sum((i + 1) * ord(ch) for i, ch in enumerate(policy))
    return [seed, tag, h, int(round(psi * 1000))]


def _fmt(x):
    if x is None:
        return ""
    return f"{x:.12g}"


def run_sweep(config: ScenarioConfig) -> list:
    """Evaluate every (policy, h, psi, evaluator) cell and return CSV row dicts.

    Rows come out ordered by policy (config order), radius, skewness and
    evaluator regardless of how many workers computed them.
    """
    config.validate()
    scene = _scene(config)
    cells = [(policy, h, psi, ev)
             for policy in config.policies
             for h in config.h
             for psi in config.psi
             for ev in _evaluators(config)]

    def work(cell):
        policy, h, psi, ev = cell
        report = _evaluate(config, scene, policy, h, psi, ev)
        return {
            "policy": policy,
            "topology": scene.label,
            "h": str(h),
            "psi": _fmt(psi),
            "c_o": _fmt(config.c_o),
            "in_network": _fmt(report.in_network),
            "origin_coeff": _fmt(report.origin_coefficient),
            "total": _fmt(report.total(config.c_o)),
            "stderr": _fmt(report.stderr),
            "evaluator": ev,
        }

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(work, cells))
    else:
        rows = [work(c) for c in cells]
    log.info("sweep produced %d rows on %s", len(rows), scene.label)
    return rows


def rows_to_csv(rows) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return out.getvalue()


def write_atomic(path, text: str) -> Path:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def default_output_path(name: str) -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / name


def read_rows(stream) -> list:
    return list(csv.DictReader(line for line in stream if not line.startswith("#")))


def emit_chart(rows, path, title: str | None = None) -> Path:
    """Line chart of total cost against skewness, one line per (policy, h, ...).

    The format follows the file suffix (``.svg`` recommended).
    """
    rows = list(rows)
    if not rows:
        raise InvalidParameterError("no rows to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = {}
    for row in rows:
        key = (row["policy"], row["h"], row.get("topology", ""), row.get("evaluator", ""))
        series.setdefault(key, []).append((float(row["psi"]), float(row["total"])))
    tag_topology = len({k[2] for k in series}) > 1
    tag_evaluator = len({k[3] for k in series}) > 1
    fig, ax = plt.subplots(figsize=(6, 4))
    for key in sorted(series):
        policy, h, topo, ev = key
        pts = sorted(series[key])
        label = f"{policy}, h={h}"
        if tag_topology:
            label += f", {topo}"
        if tag_evaluator:
            label += f" ({ev})"
        style = "-" if policy == "LCHP" else "--"
        ax.plot([p for p, _ in pts], [c for _, c in pts], style, marker="o", label=label)
    ax.set_xlabel("Zipf skewness")
    ax.set_ylabel("expected cost (hops)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed hash salt and no date keep SVG output reproducible
    matplotlib.rcParams["svg.hashsalt"] = "lchp"
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)
    return path


def figure_configs():
    """Sweep configs reproducing the grid and tree LCHP/HCHP comparisons."""
    base = ScenarioConfig(policies=("LCHP", "HCHP"), h=(2, 3), evaluator="analytic")
    return {"grid": base, "tree": replace(base, topology="tree")}
