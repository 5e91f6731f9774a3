"""Synthetic power-graph generator and evaluation harness.

``generate`` writes a complete, deterministic data directory (schema,
vertices, edges, lexicon, eval cases); ``evaluate`` replays the cases
end-to-end and aggregates accuracy and latency per question category.
Expected answer sets are computed by the brute-force oracle at generation
time, never by the engine under test.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

from .engine import Answered, Engine
from .errors import GridQAError, ParseError
from .nlq import ParsedQuestion
from .oracle import brute_force_answers
from .query import compile_plan
from .reasoner import plan
from .session import SessionRegistry, merge_constraints

#: error codes whose failures count as parsing errors in reports; everything
#: else (planning, execution) counts as a reasoning error
_PARSE_CODES = {"bad_request", "parse_failed", "no_target"}

_REGIONS = [
    "Cascadia", "Sierra", "Redwood", "Lakeshore", "Highplains", "Gulfside",
    "Bluepine", "Ironrange", "Saltflat", "Clearwater",
]
_UTILITY_WORDS = ["Pacific", "Atlantic", "Continental", "Harbor", "Summit", "Prairie"]
_SUBSTATION_WORDS = [
    "Alder", "Birch", "Cedar", "Dogwood", "Elm", "Fir", "Hazel", "Juniper",
    "Laurel", "Maple", "Oak", "Pine", "Rowan", "Spruce", "Willow", "Aspen",
    "Beech", "Chestnut", "Hickory", "Linden", "Magnolia", "Poplar",
    "Sycamore", "Walnut",
]
_MAKER_FIRST = [
    "Meridian", "Northwind", "Granite", "Solaris", "Vertex", "Keystone",
    "Pinnacle", "Bayfront", "Clearline", "Altair",
]
_MAKER_SECOND = ["Electric", "Power Systems", "Industries", "Energy Works", "Electro"]
_SUPPLIER_WORDS = ["Copperline", "Steelcore", "Voltaic", "Amperion", "Ohmic", "Ferrite"]
_DEPARTMENTS = [
    "Maintenance", "Operations", "Planning", "Safety", "Asset Management", "Field Services",
]
_EQUIPMENT_TYPES = [
    ("Oil Immersed", "distribution"), ("Dry Type", "distribution"),
    ("Gas Insulated", "transmission"), ("Pad Mounted", "distribution"),
    ("Pole Mounted", "distribution"), ("Autowound", "transmission"),
]
_KV_LEVELS = [110, 220, 330, 500, 750, 1000]
_CITIES = [
    "oakland", "fresno", "salem", "tacoma", "boise", "reno",
    "tucson", "omaha", "peoria", "dayton", "mobile", "savannah",
]
_DEFECT_TYPES = ["oil leakage", "overheating", "insulation failure", "winding damage"]
_SEVERITIES = ["minor", "moderate", "major", "critical"]
_COUNTRIES = ["usa", "germany", "japan", "china", "france"]


def packaged_text(name: str) -> str:
    """Read a bundled data file (canonical schema or lexicon)."""
    return resources.files("gridqa").joinpath(f"data/{name}").read_text()


@dataclass
class EvalCase:
    """One evaluation question with its oracle-computed expectation."""

    id: str
    question: str
    hop: str  # single | multi
    condition: str  # single | multi
    expected: list[str]
    follow_up: str | None = None
    expected_error: str | None = None

    def to_json(self) -> dict:
        doc: dict = {
            "id": self.id,
            "question": self.question,
            "category": {"hop": self.hop, "condition": self.condition},
            "expected": list(self.expected),
        }
        if self.follow_up is not None:
            doc["follow_up"] = self.follow_up
        if self.expected_error is not None:
            doc["expected_error"] = self.expected_error
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "EvalCase":
        category = doc.get("category") or {}
        return cls(
            id=str(doc.get("id", "")),
            question=doc["question"],
            hop=category.get("hop", "single"),
            condition=category.get("condition", "single"),
            expected=list(doc.get("expected", [])),
            follow_up=doc.get("follow_up"),
            expected_error=doc.get("expected_error"),
        )


def load_cases(text: str) -> list[EvalCase]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed case file: {exc}") from None
    if not isinstance(raw, list):
        raise ParseError("case file must be a JSON array")
    return [EvalCase.from_json(doc) for doc in raw]


# --------------------------------------------------------------------------
# graph generation
# --------------------------------------------------------------------------


def _allocate(total: int) -> dict[str, int]:
    """Split a vertex budget across classes; DefectRecord takes the rest."""
    counts = {name: 0 for name in (
        "VoltageLevel", "EquipmentType", "Department", "Supplier", "Region",
        "Utility", "Manufacturer", "Substation", "Transformer", "DefectRecord",
    )}
    remaining = total
    fixed = [
        ("VoltageLevel", len(_KV_LEVELS)), ("EquipmentType", len(_EQUIPMENT_TYPES)),
        ("Department", len(_DEPARTMENTS)), ("Supplier", len(_SUPPLIER_WORDS)),
        ("Region", len(_REGIONS)), ("Utility", 4),
    ]
    for name, goal in fixed:
        take = min(goal, remaining)
        counts[name] = take
        remaining -= take
    for name, share, floor in (
        ("Manufacturer", 0.02, 2), ("Substation", 0.08, 2), ("Transformer", 0.35, 2),
    ):
        take = min(max(int(total * share), floor), remaining)
        counts[name] = take
        remaining -= take
    counts["DefectRecord"] = remaining
    return counts


def _seq_name(pool: list[str], index: int, suffix: str = "") -> str:
    base = pool[index % len(pool)]
    round_no = index // len(pool)
    tail = f" {round_no + 1}" if round_no else ""
    return f"{base}{suffix}{tail}"


def _build_rows(rng: random.Random, counts: dict[str, int]) -> tuple[list[dict], list[dict]]:
    vertices: list[dict] = []
    edges: list[dict] = []

    def vert(vid: str, class_name: str, attrs: dict) -> str:
        vertices.append({"id": vid, "class": class_name, "attrs": attrs})
        return vid

    vls = [
        vert(f"V{kv}", "VoltageLevel", {"name": f"{kv} kV Level", "kv": kv})
        for kv in _KV_LEVELS[: counts["VoltageLevel"]]
    ]
    eqts = [
        vert(f"E{i + 1}", "EquipmentType", {"name": name, "category": cat})
        for i, (name, cat) in enumerate(_EQUIPMENT_TYPES[: counts["EquipmentType"]])
    ]
    depts = [
        vert(f"G{i + 1}", "Department", {"name": f"{_DEPARTMENTS[i]} Department"})
        for i in range(counts["Department"])
    ]
    sups = [
        vert(f"P{i + 1}", "Supplier", {
            "name": f"{_SUPPLIER_WORDS[i]} Supply",
            "country": rng.choice(_COUNTRIES),
        })
        for i in range(counts["Supplier"])
    ]
    regions = [
        vert(f"R{i + 1}", "Region", {"name": _REGIONS[i]})
        for i in range(counts["Region"])
    ]
    utils = [
        vert(f"U{i + 1}", "Utility", {"name": f"{_UTILITY_WORDS[i % len(_UTILITY_WORDS)]} Power Grid"})
        for i in range(counts["Utility"])
    ]
    makers = []
    for i in range(counts["Manufacturer"]):
        first = _MAKER_FIRST[i % len(_MAKER_FIRST)]
        second = _MAKER_SECOND[(i // len(_MAKER_FIRST)) % len(_MAKER_SECOND)]
        combos = len(_MAKER_FIRST) * len(_MAKER_SECOND)
        tail = f" {i + 1}" if i >= combos else ""
        makers.append(vert(f"M{i + 1:03d}", "Manufacturer", {
            "name": f"{first} {second}{tail}",
            "country": rng.choice(_COUNTRIES),
        }))
    subs = [
        vert(f"S{i + 1:03d}", "Substation", {
            "name": _seq_name(_SUBSTATION_WORDS, i, " Substation"),
            "city": rng.choice(_CITIES),
        })
        for i in range(counts["Substation"])
    ]
    commission_span = (date(2021, 6, 30) - date(1995, 1, 1)).days
    transformers = []
    for i in range(counts["Transformer"]):
        commissioned = date(1995, 1, 1) + timedelta(days=rng.randrange(commission_span + 1))
        transformers.append(vert(f"T{i + 1:04d}", "Transformer", {
            "name": f"TX-{i + 1:04d}",
            "commission_date": commissioned.isoformat(),
            "status": "in service" if rng.random() < 0.75 else "decommissioned",
            "capacity_mva": round(rng.uniform(20, 1500), 1),
        }))
    report_span = (date(2021, 12, 31) - date(2010, 1, 1)).days
    defects = []
    for i in range(counts["DefectRecord"]):
        reported = date(2010, 1, 1) + timedelta(days=rng.randrange(report_span + 1))
        defects.append(vert(f"D{i + 1:05d}", "DefectRecord", {
            "defect_type": rng.choice(_DEFECT_TYPES),
            "report_date": reported.isoformat(),
            "severity": rng.choice(_SEVERITIES),
        }))

    def link(src: str, dst: str, etype: str) -> None:
        edges.append({"src": src, "dst": dst, "type": etype})

    for tid in transformers:
        if subs:
            link(tid, rng.choice(subs), "locatedIn")
        if makers:
            link(tid, rng.choice(makers), "madeBy")
        if vls:
            link(tid, rng.choice(vls), "hasVoltage")
        if eqts:
            link(tid, rng.choice(eqts), "isType")
        if sups and rng.random() < 0.8:
            link(tid, rng.choice(sups), "suppliedBy")
    for did in defects:
        if transformers:
            link(rng.choice(transformers), did, "hasDefect")
    for sid in subs:
        if utils:
            link(sid, rng.choice(utils), "belongsTo")
        if regions:
            link(sid, rng.choice(regions), "inRegion")
        if depts:
            link(sid, rng.choice(depts), "managedBy")
    for uid in utils:
        for rid in rng.sample(regions, min(len(regions), rng.choice([1, 2]))):
            link(uid, rid, "operatesIn")
    for mid in makers:
        if sups:
            link(mid, rng.choice(sups), "sources")
            if rng.random() < 0.3:
                other = rng.choice(sups)
                link(mid, other, "sources")
    # edges are deduplicated so two rng picks of the same endpoint pair
    # do not produce parallel edges
    unique = {}
    for row in edges:
        unique.setdefault((row["src"], row["type"], row["dst"]), row)
    return vertices, [unique[key] for key in unique]


# --------------------------------------------------------------------------
# question templates
# --------------------------------------------------------------------------


class _Sampler:
    """Deterministic entity picker over a loaded store."""

    def __init__(self, engine: Engine, rng: random.Random):
        self.rng = rng
        store = engine.store
        self.names = {
            class_name: [
                store.vertices[vid].attrs["name"]
                for vid in store.class_vertices(class_name)
                if "name" in store.vertices[vid].attrs
            ]
            for class_name in store.schema.classes
        }

    def name(self, class_name: str) -> str:
        pool = self.names[class_name]
        if not pool:
            raise ParseError(f"cannot build cases: no {class_name} vertices with names")
        return self.rng.choice(pool)

    def lexicon_defect(self) -> str:
        return self.rng.choice(["oil leakage", "overheating"])

    def mva(self) -> int:
        return self.rng.choice([100, 200, 300, 500, 800, 1000])

    def kv(self) -> int:
        return self.rng.choice([110, 220, 330, 500])

    def year(self) -> int:
        return self.rng.randrange(2012, 2021)

    def duration_word(self) -> str:
        return self.rng.choice(["five", "ten", "fifteen"])


def _templates() -> list:
    """Question builders spanning both target patterns, every comparator,
    and/or/not connectors, durations, and single/multi hop plans."""
    return [
        lambda s: f"Which transformers are located in {s.name('Substation')}?",
        lambda s: f"List transformers made by {s.name('Manufacturer')}.",
        lambda s: f"Which transformers in {s.name('Substation')} have {s.lexicon_defect()}?",
        lambda s: f"How many transformers are located in {s.name('Substation')}?",
        lambda s: f"List transformers over {s.mva()} mva.",
        lambda s: "Which transformers have oil leakage or overheating?",
        lambda s: s.rng.choice([
            "List transformers without defects.",
            "List transformers not supplied.",
        ]),
        lambda s: f"Which transformers were commissioned within {s.duration_word()} years?",
        lambda s: f"List defect records reported in {s.year()}.",
        lambda s: f"Which transformers were commissioned {s.rng.choice(['since', 'before'])} {s.year()}?",
        lambda s: f"Which manufacturers made transformers with {s.lexicon_defect()}?",
        lambda s: f"List transformers in {s.name('Region')}.",
        lambda s: f"Which transformers belong to {s.name('Utility')}?",
        lambda s: "List manufacturers with country other than 'usa'.",
        lambda s: "List defect records with defect type containing 'leak'.",
        lambda s: f"List transformers with capacity at least {s.mva()} mva.",
        lambda s: f"List transformers with capacity at most {s.mva()} mva.",
        lambda s: f"Which substations have transformers with {s.lexicon_defect()} and over {s.mva()} mva?",
        lambda s: f"List transformers with {s.kv()} kv.",
        lambda s: f"List transformers under {s.mva()} mva.",
    ]


def _follow_up_templates() -> list:
    return [
        lambda s: ("Which manufacturers made transformers with oil leakage?", f"only {s.kv()} kv"),
        lambda s: (f"List transformers in {s.name('Region')}.", f"with {s.lexicon_defect()}"),
        lambda s: (f"Which transformers belong to {s.name('Utility')}?", f"commissioned since {s.year()}"),
        lambda s: (f"Which substations have transformers over {s.mva()} mva?", f"in {s.name('Region')}"),
        lambda s: (f"List transformers made by {s.name('Manufacturer')}.", "without defects"),
        lambda s: (f"Which transformers have {s.lexicon_defect()}?", f"reported in {s.year()}"),
        lambda s: (f"How many transformers are located in {s.name('Substation')}?", f"over {s.mva()} mva"),
        lambda s: (f"List transformers with {s.kv()} kv.", f"commissioned within {s.duration_word()} years"),
        lambda s: (f"Which transformers are located in {s.name('Substation')}?", "overheating or oil leakage"),
        lambda s: (f"List defect records reported in {s.year()}.", "with severity 'major'"),
    ]


def _oracle_expectation(engine: Engine, parsed: ParsedQuestion) -> tuple[list[str], str, str]:
    """(expected ids, hop flag, condition flag) for a merged parse."""
    rplan = plan(engine.schema, parsed)
    tplan = compile_plan(rplan, parsed, engine.store, evaluation_date=engine.evaluation_date)
    expected = sorted(brute_force_answers(engine.store, tplan))
    hop = "multi" if rplan.max_hops() > 1 else "single"
    condition = "multi" if len(parsed.constraints) > 1 else "single"
    return expected, hop, condition


def build_cases(engine: Engine, seed: int, plain: int = 40, follow_ups: int = 10) -> list[EvalCase]:
    """Instantiate the template corpus against a loaded graph."""
    rng = random.Random(seed + 1)
    sampler = _Sampler(engine, rng)
    cases: list[EvalCase] = []
    templates = _templates()
    for i in range(plain):
        question = templates[i % len(templates)](sampler)
        parsed = engine.parse(question)
        expected, hop, condition = _oracle_expectation(engine, parsed)
        cases.append(EvalCase(f"case-{i + 1:02d}", question, hop, condition, expected))
    fu_templates = _follow_up_templates()
    for j in range(follow_ups):
        first, fragment = fu_templates[j % len(fu_templates)](sampler)
        turn1 = engine.parse(first)
        turn2 = engine.parse_fragment(fragment)
        merged = ParsedQuestion(
            raw=fragment, tokens=turn2.tokens, tags=turn2.tags, target=turn1.target,
            constraints=merge_constraints(turn1.constraints, turn2.constraints),
        )
        expected, hop, condition = _oracle_expectation(engine, merged)
        cases.append(EvalCase(
            f"case-{plain + j + 1:02d}", first, hop, condition, expected, follow_up=fragment,
        ))
    return cases


def generate(
    data_dir: str | Path,
    seed: int = 42,
    vertex_count: int = 10_000,
    case_count: int = 50,
) -> dict:
    """Write a full deterministic eval bundle into ``data_dir``.

    Returns summary statistics. Byte-identical output for identical
    arguments: the single seeded RNG is consumed in a fixed order and
    every file is serialized with a stable layout.
    """
    root = Path(data_dir)
    root.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    vertices, edges = _build_rows(rng, _allocate(vertex_count))

    (root / "schema.json").write_text(packaged_text("schema.json"))
    (root / "lexicon.json").write_text(packaged_text("lexicon.json"))
    (root / "vertices.jsonl").write_text(
        "".join(json.dumps(row, sort_keys=True) + "\n" for row in vertices)
    )
    (root / "edges.jsonl").write_text(
        "".join(json.dumps(row, sort_keys=True) + "\n" for row in edges)
    )

    cases: list[EvalCase] = []
    if vertex_count > 0 and case_count > 0:
        engine = Engine.load(root)
        follow_ups = min(case_count // 5, 10)
        cases = build_cases(engine, seed, plain=case_count - follow_ups, follow_ups=follow_ups)
    (root / "cases.json").write_text(
        json.dumps([c.to_json() for c in cases], indent=2, sort_keys=True) + "\n"
    )
    return {
        "vertices": len(vertices),
        "edges": len(edges),
        "cases": len(cases),
        "seed": seed,
    }


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


@dataclass
class CaseResult:
    case: EvalCase
    outcome: str  # accepted | wrong_answer | parse_error | reasoning_error | category_mismatch
    elapsed_ms: float
    got: list[str] | None = None
    error_code: str | None = None

    def to_json(self) -> dict:
        return {
            "id": self.case.id,
            "outcome": self.outcome,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "got": self.got,
            "expected": list(self.case.expected),
            "error_code": self.error_code,
        }


@dataclass
class EvalReport:
    results: list[CaseResult]

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def accepted(self) -> int:
        return sum(1 for r in self.results if r.outcome == "accepted")

    @property
    def parsing_errors(self) -> int:
        return sum(1 for r in self.results if r.outcome == "parse_error")

    @property
    def reasoning_errors(self) -> int:
        return sum(1 for r in self.results if r.outcome == "reasoning_error")

    @property
    def other_failures(self) -> int:
        return sum(
            1 for r in self.results if r.outcome in ("wrong_answer", "category_mismatch")
        )

    @property
    def accuracy(self) -> float:
        return self.accepted / self.total if self.total else 0.0

    @property
    def avg_ms(self) -> float:
        return sum(r.elapsed_ms for r in self.results) / self.total if self.total else 0.0

    def _bucket(self, predicate) -> dict:
        rows = [r for r in self.results if predicate(r.case)]
        return {
            "questions": len(rows),
            "accepted": sum(1 for r in rows if r.outcome == "accepted"),
            "avg_ms": round(sum(r.elapsed_ms for r in rows) / len(rows), 3) if rows else 0.0,
        }

    def categories(self) -> dict[str, dict]:
        return {
            "single_hop": self._bucket(lambda c: c.hop == "single"),
            "multi_hop": self._bucket(lambda c: c.hop == "multi"),
            "single_condition": self._bucket(lambda c: c.condition == "single"),
            "multi_condition": self._bucket(lambda c: c.condition == "multi"),
        }

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "accepted": self.accepted,
            "accuracy": round(self.accuracy, 4),
            "parsing_errors": self.parsing_errors,
            "reasoning_errors": self.reasoning_errors,
            "other_failures": self.other_failures,
            "avg_ms": round(self.avg_ms, 3),
            "categories": self.categories(),
            "results": [r.to_json() for r in self.results],
        }

    def to_text(self) -> str:
        labels = {
            "single_hop": "Single-hop", "multi_hop": "Multi-hop",
            "single_condition": "Single-condition", "multi_condition": "Multi-condition",
        }
        lines = [
            f"{'Question Type':<18} {'Quantity':>8} {'Accepted':>9} {'Avg Time (ms)':>14}",
        ]
        for key, row in self.categories().items():
            lines.append(
                f"{labels[key]:<18} {row['questions']:>8} {row['accepted']:>9} {row['avg_ms']:>14.1f}"
            )
        lines.append(
            f"{'Overall':<18} {self.total:>8} {self.accepted:>9} {self.avg_ms:>14.1f}"
        )
        lines.append(
            f"accuracy {self.accuracy:.2%} | parsing errors {self.parsing_errors}"
            f" | reasoning errors {self.reasoning_errors}"
            f" | other failures {self.other_failures}"
        )
        return "\n".join(lines)


def _run_case(engine: Engine, case: EvalCase) -> CaseResult:
    start = time.perf_counter()

    def elapsed() -> float:
        return (time.perf_counter() - start) * 1000.0

    try:
        if case.follow_up is not None:
            registry = SessionRegistry(engine)
            sid = registry.create().id
            registry.ask(sid, case.question, "fresh")
            result: Answered = registry.ask(sid, case.follow_up, "follow_up")
        else:
            result = engine.answer(case.question)
    except GridQAError as exc:
        if case.expected_error == exc.code:
            return CaseResult(case, "accepted", elapsed(), error_code=exc.code)
        kind = "parse_error" if exc.code in _PARSE_CODES else "reasoning_error"
        return CaseResult(case, kind, elapsed(), error_code=exc.code)
    took = elapsed()
    if case.expected_error is not None:  # the failure this case demands never came
        return CaseResult(case, "wrong_answer", took, got=sorted(result.answer.answers))
    hop = "multi" if result.reasoning.max_hops() > 1 else "single"
    condition = "multi" if len(result.parsed.constraints) > 1 else "single"
    got = sorted(result.answer.answers)
    if (hop, condition) != (case.hop, case.condition):
        return CaseResult(case, "category_mismatch", took, got=got)
    outcome = "accepted" if got == sorted(case.expected) else "wrong_answer"
    return CaseResult(case, outcome, took, got=got)


def evaluate(engine: Engine, cases: list[EvalCase], concurrency: int = 4) -> EvalReport:
    """Run every case; failures become report rows, never harness crashes.

    Category labels are re-measured from the executed plan and verified
    against the stored flags rather than trusted.
    """
    if not cases:
        return EvalReport([])
    if concurrency <= 1:
        return EvalReport([_run_case(engine, case) for case in cases])
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        results = list(pool.map(lambda c: _run_case(engine, c), cases))
    return EvalReport(results)


__all__ = [
    "CaseResult", "EvalCase", "EvalReport", "build_cases", "evaluate",
    "generate", "load_cases", "packaged_text",
]
