"""Cross-checking batteries replaying every law the package relies on.

Each suite enumerates instances exhaustively at sizes 1 to 3 and, when
asked for size 4, adds a seeded sample.  Instances are planned once in
the parent process, split into fixed-size chunks, and merged
associatively with the counterexample taken at the least instance
index, so the summary is byte-identical for any worker count.
"""

from __future__ import annotations

import itertools
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .construct import (
    end_extension,
    extend_map_kappa,
    make_extension,
    merged_end_extension,
    o_set,
    simple_extension,
    strict_extension,
    theta_quotient,
)
from .defsets import DefSet, Point
from .errors import SizeLimit
from .finite import (
    FinitePretop,
    FiniteTopology,
    PrincipalFilter,
    compact_at,
    count_hausdorff,
    enumerate_pretops,
    enumerate_topologies,
    is_cover_compact,
    is_topological,
)
from .intervals import AxisDomain, IntervalSet
from .maps import (
    CONTINUITY_METHODS,
    SpaceMap,
    is_continuous,
    is_perfect,
)
from .model import eval_set, parse_set_expr
from .regularize import (
    PHC_METHODS,
    hset_check,
    is_quasi_phc,
    partial_regularization,
    tower_lemmas_check,
)
from .symbolic import (
    StrandMap,
    build_sym_map,
    builtin,
    sym_adh,
    sym_identity,
    sym_is_continuous,
    sym_regularize,
)
from .symbolic.space import box_points, truncate

_SAMPLE = 1200
_CHUNK = 512
_MAX_POINTS = 4

COVER_COMPACT_METHODS = ("cover", "filter-refines", "vicinity-separation")
HSET_METHODS = ("open-filter", "open-ultrafilter", "theta-adh")


def _space(vic: tuple) -> FinitePretop:
    return FinitePretop(tuple(str(i + 1) for i in range(len(vic))), tuple(vic))


def _sizes(n: int):
    return range(1, min(n, 3) + 1)


def _vics(size: int) -> list:
    return [sp.vicinity for sp in enumerate_pretops(size)]


def _rand_vic(size: int, rng: random.Random) -> tuple:
    return tuple(rng.randrange(1 << size) | (1 << i) for i in range(size))


def _subsets_of(mask: int):
    """Submasks in ascending numeric order."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


# -- map batteries -------------------------------------------------------------


def _plan_maps(n: int, rng: random.Random) -> list:
    out = []
    for size in _sizes(n):
        vics = _vics(size)
        graphs = list(itertools.product(range(size), repeat=size))
        for va in vics:
            for vb in vics:
                for g in graphs:
                    out.append((va, vb, g))
    if n >= 4:
        for _ in range(_SAMPLE):
            out.append(
                (
                    _rand_vic(4, rng),
                    _rand_vic(4, rng),
                    tuple(rng.randrange(4) for _ in range(4)),
                )
            )
    return out


def _check_continuity(inst) -> str | None:
    va, vb, g = inst
    f = SpaceMap(_space(va), _space(vb), g)
    got = {m: is_continuous(f, m).ok for m in CONTINUITY_METHODS}
    if len(set(got.values())) != 1:
        return f"routes disagree {got} on vic={va}->{vb} graph={g}"
    return None


def _check_perfect(inst) -> str | None:
    va, vb, g = inst
    f = SpaceMap(_space(va), _space(vb), g)
    by_def = is_perfect(f, "definition").ok
    by_adh = is_perfect(f, "adh-inequality").ok
    if by_def != by_adh:
        return f"definition={by_def} adh-inequality={by_adh} on vic={va}->{vb} graph={g}"
    if is_continuous(f).ok:
        by_ab = is_perfect(f, "a-and-b").ok
        if by_def != by_ab:
            return f"definition={by_def} a-and-b={by_ab} on continuous vic={va}->{vb} graph={g}"
    return None


# -- compactness batteries --------------------------------------------------------


def _plan_compact_at(n: int, rng: random.Random) -> list:
    out = []
    for size in _sizes(n):
        full = (1 << size) - 1
        for vic in _vics(size):
            for k in range(1, full + 1):
                for at in range(1, full + 1):
                    out.append((vic, k, at))
    if n >= 4:
        for _ in range(_SAMPLE):
            out.append((_rand_vic(4, rng), rng.randrange(1, 16), rng.randrange(1, 16)))
    return out


def _check_compact_at(inst) -> str | None:
    vic, k, at = inst
    sp = _space(vic)
    f = PrincipalFilter(k)
    by_filter = compact_at(sp, f, at, "filter").ok
    by_cover = compact_at(sp, f, at, "cover").ok
    if by_filter != by_cover:
        return f"filter={by_filter} cover={by_cover} on vic={vic} kernel={k} at={at}"
    return None


def _plan_cover_compact(n: int, rng: random.Random) -> list:
    out = []
    for size in _sizes(n):
        for vic in _vics(size):
            for at in range(1, (1 << size)):
                out.append((vic, at))
    if n >= 4:
        for _ in range(_SAMPLE):
            out.append((_rand_vic(4, rng), rng.randrange(1, 16)))
    return out


def _check_cover_compact(inst) -> str | None:
    vic, at = inst
    sp = _space(vic)
    got = {m: is_cover_compact(sp, at, m).ok for m in COVER_COMPACT_METHODS}
    if len(set(got.values())) != 1:
        return f"routes disagree {got} on vic={vic} at={at}"
    return None


# -- regularization batteries -------------------------------------------------------


def _plan_filters(n: int, rng: random.Random) -> list:
    out = []
    for size in _sizes(n):
        for vic in _vics(size):
            for k in range(1, (1 << size)):
                out.append((vic, k))
    if n >= 4:
        for _ in range(_SAMPLE):
            out.append((_rand_vic(4, rng), rng.randrange(1, 16)))
    return out


def _check_open_filter(inst) -> str | None:
    vic, k = inst
    report = tower_lemmas_check(_space(vic), PrincipalFilter(k))
    if not report.open_identity:
        return (
            f"open filter kernel={k} on vic={vic}: adh {report.adh_base}"
            f" vs regularized {report.adh_regularized}"
        )
    return None


def _check_tower_level(inst) -> str | None:
    vic, k = inst
    report = tower_lemmas_check(_space(vic), PrincipalFilter(k))
    if not report.level_identity:
        return (
            f"kernel={k} on vic={vic}: regularized adh {report.adh_regularized}"
            f" vs level-1 adh {report.adh_level1}"
        )
    return None


def _plan_spaces(n: int, rng: random.Random) -> list:
    out = [(vic,) for size in _sizes(n) for vic in _vics(size)]
    if n >= 4:
        for _ in range(_SAMPLE):
            out.append((_rand_vic(4, rng),))
    return out


def _check_quasi_phc(inst) -> str | None:
    (vic,) = inst
    sp = _space(vic)
    got = {m: is_quasi_phc(sp, m).ok for m in PHC_METHODS}
    if len(set(got.values())) != 1:
        return f"routes disagree {got} on vic={vic}"
    return None


def _plan_hset(n: int, rng: random.Random) -> list:
    del rng  # the topology count stays exhaustive through size 4
    out = []
    for size in range(1, min(n, 4) + 1):
        for topo in enumerate_topologies(size):
            opens = tuple(sorted(topo.opens))
            for at in range(1, topo.full + 1):
                out.append((size, opens, at))
    return out


def _check_hset(inst) -> str | None:
    size, opens, at = inst
    topo = FiniteTopology(tuple(str(i + 1) for i in range(size)), frozenset(opens))
    got = {m: hset_check(topo, at, m).ok for m in HSET_METHODS}
    if len(set(got.values())) != 1:
        return f"routes disagree {got} on opens={opens} at={at}"
    return None


# -- construction batteries ----------------------------------------------------------


def _partitions(size: int):
    """Fiber label tuples in restricted-growth form; one per partition."""

    def rec(prefix: list, mx: int):
        if len(prefix) == size:
            yield tuple(prefix)
            return
        for v in range(mx + 2):
            yield from rec(prefix + [v], max(mx, v))

    yield from rec([], -1)


def _plan_quotients(n: int, rng: random.Random) -> list:
    out = []
    for size in _sizes(n):
        parts = list(_partitions(size))
        for vic in _vics(size):
            for labels in parts:
                out.append((vic, labels))
    if n >= 4:
        parts4 = list(_partitions(4))
        for _ in range(_SAMPLE):
            out.append((_rand_vic(4, rng), rng.choice(parts4)))
    return out


def _check_quotient(inst) -> str | None:
    vic, labels = inst
    sp = _space(vic)
    table = {p: f"c{labels[i]}" for i, p in enumerate(sp.points)}
    res = theta_quotient(sp, table)
    if not res.lemma_ok:
        return f"convergence mismatch on vic={vic} labels={labels}"
    return None


def _plan_extensions(n: int, rng: random.Random) -> list:
    out = []
    for size in _sizes(n):
        full = (1 << size) - 1
        for vic in _vics(size):
            sp = _space(vic)
            for base in range(1, full + 1):
                if sp.adh(base) == sp.full:
                    out.append((vic, base))
    if n >= 4:
        added = 0
        while added < _SAMPLE:
            vic = _rand_vic(4, rng)
            base = rng.randrange(1, 16)
            if _space(vic).adh(base) == 15:
                out.append((vic, base))
                added += 1
    return out


def _check_extension_order(inst) -> str | None:
    vic, base = inst
    sp = _space(vic)
    e = make_extension(sp, base)
    yplus = strict_extension(e)
    ysharp = simple_extension(e)
    ryplus = partial_regularization(yplus)
    for i in range(sp.n):
        if ysharp.vicinity[i] & ~ryplus.vicinity[i]:
            return (
                f"simple kernel escapes the regularized strict one at point"
                f" {sp.points[i]} on vic={vic} base={base}"
            )
    ident = tuple(range(sp.n))
    if not is_continuous(SpaceMap(yplus, sp, ident)).ok:
        return f"identity from the strict extension not continuous on vic={vic} base={base}"
    if is_topological(sp).ok:
        if not is_continuous(SpaceMap(sp, ysharp, ident)).ok:
            return f"identity into the simple extension not continuous on vic={vic} base={base}"
    return None


def _check_strict_adh(inst) -> str | None:
    """Adherence formula in the strict extension: for a point outside the
    base and a base set containing its trace, adh({p} + U) = oU + adh U."""
    vic, base = inst
    sp = _space(vic)
    e = make_extension(sp, base)
    yplus = strict_extension(e)
    for i in range(sp.n):
        if base >> i & 1:
            continue
        tr = e.trace(i)
        for u in _subsets_of(base):
            if tr & ~u:
                continue
            left = yplus.adh((1 << i) | u)
            right = o_set(e, u) | e.base_adh(u)
            if left != right:
                return (
                    f"adh {left} vs oU|adh {right} at p={sp.points[i]}"
                    f" U={u} on vic={vic} base={base}"
                )
    return None


def _plan_hausdorff(n: int, rng: random.Random) -> list:
    del rng
    return [(size,) for size in range(1, min(n, 4) + 1)]


def _check_hausdorff_count(inst) -> str | None:
    (size,) = inst
    count = count_hausdorff(size)
    if count != 1:
        return f"{count} Hausdorff pretopologies on {size} points, wanted the discrete one only"
    return None


# -- algebra batteries -----------------------------------------------------------


def _rand_interval(rng: random.Random, axis: AxisDomain) -> IntervalSet:
    pairs = []
    for _ in range(rng.randrange(3)):
        lo = None if rng.random() < 0.2 else rng.randint(-6, 6)
        hi = None if rng.random() < 0.2 else rng.randint(-6, 6)
        if lo is not None and hi is not None and lo > hi:
            lo, hi = hi, lo
        pairs.append((lo, hi))
    return IntervalSet.from_pairs(axis, pairs)


def _plan_intervals(n: int, rng: random.Random) -> list:
    del n
    out = []
    for i in range(240):
        axis = ("int", "nat0", "nat1")[i % 3]
        out.append((axis, rng.randrange(2**32)))
    return out


_AXES = {
    "int": AxisDomain("int"),
    "nat0": AxisDomain("nat", 0),
    "nat1": AxisDomain("nat", 1),
}


def _check_intervals(inst) -> str | None:
    key, mini_seed = inst
    axis = _AXES[key]
    rng = random.Random(mini_seed)
    a, b, c = (_rand_interval(rng, axis) for _ in range(3))
    where = f"axis={key} seed={mini_seed}"
    if ~(a | b) != (~a & ~b):
        return f"De Morgan fails {where}"
    if ~~a != a:
        return f"double complement fails {where}"
    if (a | (b & c)) != ((a | b) & (a | c)):
        return f"distributivity fails {where}"
    if (a - b) != (a & ~b):
        return f"difference fails {where}"
    if not (a & b).subset_of(a) or not a.subset_of(a | b):
        return f"ordering fails {where}"
    if a.meets(b) != (not (a & b).is_empty()):
        return f"meets fails {where}"
    if key == "int" and a.shift(5).shift(-5) != a:
        return f"shift round trip fails {where}"
    lo = -15 if axis.kind == "int" else axis.low
    for v in range(lo, 16):
        if ((v in a) or (v in b)) != (v in (a | b)):
            return f"union membership fails at {v} {where}"
        if ((v in a) and (v in b)) != (v in (a & b)):
            return f"intersection membership fails at {v} {where}"
        if (v in a) == (v in ~a):
            return f"complement membership fails at {v} {where}"
    return None


def _rand_defset(rng: random.Random, schema) -> DefSet:
    atoms = [a for a in schema.atoms if rng.random() < 0.5]
    ray_parts = {n: _rand_interval(rng, ax) for n, ax in schema.rays}
    grid_rects = {
        n: [
            (_rand_interval(rng, rows_ax), _rand_interval(rng, cols_ax))
            for _ in range(rng.randrange(3))
        ]
        for n, rows_ax, cols_ax in schema.grids
    }
    return DefSet.build(schema, atoms, ray_parts, grid_rects)


def _plan_defsets(n: int, rng: random.Random) -> list:
    del n
    out = []
    for i in range(180):
        key = ("urysohn", "half_grid", "discrete_ray(2)")[i % 3]
        out.append((key, rng.randrange(2**32)))
    return out


def _check_defsets(inst) -> str | None:
    key, mini_seed = inst
    schema = builtin(key).schema
    rng = random.Random(mini_seed)
    s = _rand_defset(rng, schema)
    t = _rand_defset(rng, schema)
    where = f"schema={key} seed={mini_seed}"
    if ~(s | t) != (~s & ~t):
        return f"De Morgan fails {where}"
    if ~~s != s:
        return f"double complement fails {where}"
    if (s - t) != (s & ~t):
        return f"difference fails {where}"
    if s.meets(t) != (not (s & t).is_empty()):
        return f"meets fails {where}"
    if (s | s) != s or (s & s) != s:
        return f"idempotence fails {where}"
    probes = set(
        itertools.chain(
            s.iter_sample_points(),
            t.iter_sample_points(),
            (~s).iter_sample_points(),
            (s | t).iter_sample_points(),
        )
    )
    for p in probes:
        if ((p in s) or (p in t)) != (p in (s | t)):
            return f"union membership fails at {p.describe()} {where}"
        if ((p in s) and (p in t)) != (p in (s & t)):
            return f"intersection membership fails at {p.describe()} {where}"
        if (p in s) == (p in ~s):
            return f"complement membership fails at {p.describe()} {where}"
    return None


# -- symbolic engine batteries ------------------------------------------------------


def _defset_bound(d: DefSet) -> int:
    best = 0
    for _, sel in d.rays:
        best = max(best, sel.max_finite_endpoint())
    for _, groups in d.grids:
        for rows, cols in groups:
            best = max(best, rows.max_finite_endpoint(), cols.max_finite_endpoint())
    return best


def _box_defset(x, w: int) -> DefSet:
    schema = x.schema
    d = DefSet.build(
        schema,
        atoms=schema.atoms,
        ray_parts={n: IntervalSet.from_pairs(ax, [(None, w)]) for n, ax in schema.rays},
        grid_rects={
            n: [
                (
                    IntervalSet.from_pairs(rows_ax, [(-w, w)]),
                    IntervalSet.from_pairs(cols_ax, [(-w, w)]),
                )
            ]
            for n, rows_ax, cols_ax in schema.grids
        },
    )
    return d & x.carrier_set


_DUAL_ENGINE_SETS = {
    "urysohn": (
        "grid(G; cols>0)",
        "grid(G; cols=0)",
        "atom(pinf) | atom(minf)",
        "grid(G; rows=1..3)",
        "grid(G; cols=..-1) | atom(minf)",
    ),
    "half_grid": ("grid(G; cols=0)", "grid(G; cols=2..)", "grid(G; rows=2)"),
    "discrete_ray(2)": ("ray(R1; 3..)", "ray(R2; 0..2)", "ray(R1)"),
}


def _plan_dual_engine(n: int, rng: random.Random) -> list:
    del n, rng
    return [(key, lit) for key, lits in _DUAL_ENGINE_SETS.items() for lit in lits]


def _check_dual_engine(inst) -> str | None:
    key, lit = inst
    x = builtin(key)
    s = eval_set(parse_set_expr(lit), x)
    w = 2 * (x.bound + _defset_bound(s)) + 5
    fin = truncate(x, w)
    pts = box_points(x, w)
    mask = sum(1 << i for i, p in enumerate(pts) if p in s)
    adh_fin = fin.adh(mask)
    adh_sym = sym_adh(x, s)
    box = _box_defset(x, w)
    for i, p in enumerate(pts):
        if not x.vicinity(p, w).subset_of(box):
            continue  # clipped kernel: the snapshot is not faithful here
        if bool(adh_fin >> i & 1) != (p in adh_sym):
            return f"{key} window={w} set {lit}: engines disagree at {p.describe()}"
    return None


def _plan_kappa(n: int, rng: random.Random) -> list:
    del n, rng
    return [("ray1",), ("ray2",), ("urysohn",)]


def _check_kappa(inst) -> str | None:
    (case,) = inst
    if case == "ray1":
        x = builtin("discrete_ray(1)")
        ext = end_extension(x)
        names = tuple(dict.fromkeys(name for name, _ in ext.added))
        if names != ("end_R1_plus",):
            return f"added {names}, wanted one end point"
        if not ext.compact.ok:
            return "one-ray end extension not compact"
        shift = build_sym_map(x, x, {"R1": StrandMap.shift("R1", 1)}, label="shift")
        km = extend_map_kappa(shift, ext, ext)
        if not km.continuous.ok:
            return "extended shift map not continuous"
        if km.map.apply(Point.atom("end_R1_plus")) != Point.atom("end_R1_plus"):
            return "extended shift map moves the end point"
        return None
    if case == "ray2":
        x = builtin("discrete_ray(2)")
        ext = end_extension(x)
        merged = merged_end_extension(x)
        if not ext.compact.ok or not merged.compact.ok:
            return "two-ray extensions not compact"
        if not sym_is_continuous(sym_identity(ext.space)).ok:
            return "identity onto the two-point extension not continuous"
        onto_one = build_sym_map(
            ext.space,
            merged.space,
            {
                "R1": "R1",
                "R2": "R2",
                "end_R1_plus": Point.atom("omega"),
                "end_R2_plus": Point.atom("omega"),
            },
            label="merge ends",
        )
        if not sym_is_continuous(onto_one).ok:
            return "merge onto the one-point extension not continuous"
        return None
    x = builtin("urysohn")
    ext = end_extension(x)
    names = tuple(dict.fromkeys(name for name, _ in ext.added))
    if names != ("end_G_plus_0",):
        return f"added {names}, wanted the zero-column end"
    if not ext.compact.ok:
        return "urysohn end extension not compact"
    reg = sym_regularize(x)
    ext_reg = end_extension(reg)
    if ext_reg.added != ():
        return "regularized urysohn still has non-converging ends"
    if not ext_reg.compact.ok:
        return "regularized urysohn not compact"
    return None


# -- registry and runner -------------------------------------------------------------


@dataclass(frozen=True)
class Suite:
    name: str
    plan: object
    check: object


SUITES = {
    s.name: s
    for s in (
        Suite("continuity-5way", _plan_maps, _check_continuity),
        Suite("compact-at-2way", _plan_compact_at, _check_compact_at),
        Suite("cover-compact-3way", _plan_cover_compact, _check_cover_compact),
        Suite("perfect-3way", _plan_maps, _check_perfect),
        Suite("open-filter-adh", _plan_filters, _check_open_filter),
        Suite("tower-level-adh", _plan_filters, _check_tower_level),
        Suite("quasi-phc-4way", _plan_spaces, _check_quasi_phc),
        Suite("hset-3way", _plan_hset, _check_hset),
        Suite("theta-quotient", _plan_quotients, _check_quotient),
        Suite("extension-order", _plan_extensions, _check_extension_order),
        Suite("strict-extension-adh", _plan_extensions, _check_strict_adh),
        Suite("hausdorff-collapse", _plan_hausdorff, _check_hausdorff_count),
        Suite("interval-laws", _plan_intervals, _check_intervals),
        Suite("defset-boolean", _plan_defsets, _check_defsets),
        Suite("symbolic-dual-engine", _plan_dual_engine, _check_dual_engine),
        Suite("kappa-fragment", _plan_kappa, _check_kappa),
    )
}


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checked: int
    failures: int
    counterexample: str | None


@dataclass(frozen=True)
class OracleSummary:
    max_points: int
    seed: int
    suites: tuple  # SuiteResult, in registry order

    @property
    def all_pass(self) -> bool:
        return all(s.failures == 0 for s in self.suites)

    def to_json(self) -> str:
        doc = {
            "config": {
                "max_points": self.max_points,
                "seed": self.seed,
                "suites": [s.name for s in self.suites],
            },
            "suites": [
                {
                    "name": s.name,
                    "checked": s.checked,
                    "failures": s.failures,
                    "counterexample": s.counterexample,
                }
                for s in self.suites
            ],
            "all_pass": self.all_pass,
        }
        return json.dumps(doc, indent=2)


def _run_chunk(name: str, chunk: list, base: int) -> tuple:
    """(checked, failures, first failing index, witness) for one slice."""
    check = SUITES[name].check
    failures = 0
    first = None
    witness = None
    for off, inst in enumerate(chunk):
        bad = check(inst)
        if bad is not None:
            failures += 1
            if first is None:
                first = base + off
                witness = bad
    return len(chunk), failures, first, witness


def run_suites(
    suites="all",
    max_points: int = 3,
    seed: int = 0,
    workers: int = 1,
) -> OracleSummary:
    """Run the batteries and fold the chunk results into one summary."""
    if not 1 <= max_points <= _MAX_POINTS:
        raise SizeLimit(f"exhaustive batteries support 1..{_MAX_POINTS} points, got {max_points}")
    if suites == "all" or suites is None:
        names = list(SUITES)
    else:
        names = [suites] if isinstance(suites, str) else list(suites)
        for name in names:
            if name not in SUITES:
                raise ValueError(f"unknown suite {name!r}")
        names = [n for n in SUITES if n in names]

    tasks = []  # (suite name, chunk, base index)
    for name in names:
        rng = random.Random(f"{seed}:{name}")
        instances = SUITES[name].plan(max_points, rng)
        for base in range(0, len(instances), _CHUNK):
            tasks.append((name, instances[base : base + _CHUNK], base))

    if workers <= 1:
        outcomes = [_run_chunk(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, *t) for t in tasks]
            outcomes = [f.result() for f in futures]

    results = []
    for name in names:
        checked = failures = 0
        first = None
        witness = None
        for (task_name, _, _), (got, bad, idx, w) in zip(tasks, outcomes):
            if task_name != name:
                continue
            checked += got
            failures += bad
            if idx is not None and (first is None or idx < first):
                first, witness = idx, w
        results.append(SuiteResult(name, checked, failures, witness))
    return OracleSummary(max_points, seed, tuple(results))
