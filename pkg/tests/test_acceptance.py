"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` (the lines also show under ``-v``).
"""

import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from approxgram.chart import ParseNode, build_chart, enumerate_parses, extract
from approxgram.corpus import read_corpus
from approxgram.evaluation import evaluate_grammar
from approxgram.grammar import parse_grammar, serialize_grammar
from approxgram.learner import LearnerConfig, generate_rules, learn_grammar
from approxgram.synthetic import CLEAN, CorpusOptions, generate_corpus
from approxgram.textmodel import gap_chars, parse_annotated_document

from generators import brute_force_parses, random_cluster, random_depth1_grammar, random_document, random_dsl_grammar

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
PROPERTY_SECONDS = {}


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail, seconds):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} [{criterion}] {detail} ({seconds:.3f}s)")
        assert ok, detail

    return emit


def test_1_learned_rule_probabilities(report):
    t0 = time.perf_counter()
    g = learn_grammar(read_corpus([DATA / "batsmen.jsonl"]), LearnerConfig(rho=0.0))
    probs = sorted(r.probability for r in g.rules)
    expected = sorted([0.5] + [0.5 / 9] * 3 + [0.5 * 2 / 9] * 3)
    dt = time.perf_counter() - t0
    ok = len(probs) == 7 and all(abs(a - b) <= 1e-3 for a, b in zip(probs, expected)) and dt < 1.0
    report("1 learned rules", ok, f"{len(probs)} rules, probabilities {[round(p, 4) for p in probs]}", dt)


def test_2_parse_scoring(report):
    t0 = time.perf_counter()
    [doc] = read_corpus([DATA / "boats.jsonl"])
    g = parse_grammar((DATA / "boats.grammar").read_text())
    [s] = enumerate_parses(build_chart(doc, g), "S")
    np_, vp = [c for c in s.children if isinstance(c, ParseNode)]
    dt = time.perf_counter() - t0
    got = (np_.score, vp.score, s.score)
    ok = all(abs(a - b) <= 1e-9 for a, b in zip(got, (0.42, 0.39, 0.3645))) and dt < 1.0
    report("2 parse scoring", ok, f"NP={got[0]!r} VP={got[1]!r} S={got[2]!r}", dt)


def test_3_proximity_rejection(report):
    t0 = time.perf_counter()
    [doc] = read_corpus([DATA / "calcutta.jsonl"])
    g = parse_grammar((DATA / "calcutta.grammar").read_text())
    runs = next(p for p in doc.probes if p.category == "runs")
    loc = next(p for p in doc.probes if p.category == "location")
    gap = gap_chars(doc, runs.char_range[1], loc.char_range[0])
    found = extract(doc, g)
    dt = time.perf_counter() - t0
    report("3 Calcutta", found == [] and gap == 22 and dt < 1.0, f"{len(found)} extractions, gap {gap}", dt)


AMBEDKAR = "<name><degree>B.A</degree>. Ambedkar</name> is highly honored in <country>India</country>."


def test_4_disambiguation(report):
    t0 = time.perf_counter()
    [doc] = read_corpus([DATA / "sahara.jsonl"])
    sahara = [e.surface_text for e in extract(doc, parse_grammar((DATA / "sahara.grammar").read_text()))]
    amb = parse_annotated_document(AMBEDKAR, "ambedkar")
    wins, trials = 0, 0
    for p_degree in [0.05 * k for k in range(1, 19)]:
        for p_name in [p_degree + d for d in (0.001, 0.01, 0.1) if p_degree + d <= 1.0]:
            g = parse_grammar(
                f'IMP -> {{name}} "honored" {{country}} ; prob={p_name}\n'
                f'IMP -> {{degree}} "honored" {{country}} ; prob={p_degree}\n'
            )
            [ex] = extract(amb, g)
            trials += 1
            wins += ex.rule_id == "U#1"
    dt = time.perf_counter() - t0
    ok = sahara == ["Sachin Tendulkar plays for India"] and wins == trials and dt < 1.0
    report("4 Disambiguation", ok, f"Sahara -> {sahara}; Ambedkar name-rule selected {wins}/{trials}", dt)


def test_5a_mass_conservation(report):
    t0 = time.perf_counter()
    rng = random.Random(1)
    worst = 0.0
    for _ in range(1000):
        c = random_cluster(rng)
        for k in range(10):
            total = sum(r.probability for r in generate_rules(c, LearnerConfig(rho=k / 10)))
            worst = max(worst, abs(total - 1.0))
    dt = time.perf_counter() - t0
    PROPERTY_SECONDS["5a"] = dt
    report("5a mass conservation", worst <= 1e-9, f"1000 clusters x 10 rho, worst |sum-1| = {worst:.2e}", dt)


def test_5b_oracle_equivalence(report):
    t0 = time.perf_counter()
    rng = random.Random(2)
    mismatches, nonempty = 0, 0
    for _ in range(200):
        doc = random_document(rng, max_tokens=30)
        g = random_depth1_grammar(rng, max_rules=10)
        assert len(doc.tokens) <= 30 and len(g.rules) <= 10
        chart_set = {(p.rule_id, p.char_range) for p in enumerate_parses(build_chart(doc, g), "IMP")}
        oracle = brute_force_parses(doc, g)
        mismatches += chart_set != oracle
        nonempty += bool(oracle)
    dt = time.perf_counter() - t0
    PROPERTY_SECONDS["5b"] = dt
    report("5b oracle equivalence", mismatches == 0, f"200 pairs ({nonempty} with parses), {mismatches} mismatches", dt)


def test_5c_self_extraction(report):
    t0 = time.perf_counter()
    corpora = [read_corpus([DATA / "synthetic_clean.jsonl"])]
    for seed in range(5):
        corpora.append([parse_annotated_document(t, i) for i, t in generate_corpus(60, 100 + seed, CLEAN)])
    recalls = [evaluate_grammar(learn_grammar(docs, LearnerConfig(rho=0.0)), docs).recall for docs in corpora]
    dt = time.perf_counter() - t0
    PROPERTY_SECONDS["5c"] = dt
    report("5c self-extraction", all(r == 1.0 for r in recalls), f"recall on {len(corpora)} training corpora: {recalls}", dt)


def test_5d_rho_monotonicity(report):
    t0 = time.perf_counter()
    rng = random.Random(4)
    violations = 0
    steps = [k / 10 for k in range(10)]
    for _ in range(300):
        c = random_cluster(rng)
        shapes = [{r.shape for r in generate_rules(c, LearnerConfig(rho=rho))} for rho in steps]
        violations += sum(not later <= earlier for earlier, later in zip(shapes, shapes[1:]))
    docs = [parse_annotated_document(t, i) for i, t in generate_corpus(200, 9, CorpusOptions())]
    grammar_shapes = [{(r.lhs, r.shape) for r in learn_grammar(docs, LearnerConfig(rho=rho)).rules} for rho in steps]
    violations += sum(not later <= earlier for earlier, later in zip(grammar_shapes, grammar_shapes[1:]))
    sizes = [len(s) for s in grammar_shapes]
    dt = time.perf_counter() - t0
    PROPERTY_SECONDS["5d"] = dt
    report("5d rho monotonicity", violations == 0, f"300 clusters + corpus sweep, shape counts {sizes}, {violations} violations", dt)


def test_5e_dsl_round_trip(report):
    t0 = time.perf_counter()
    rng = random.Random(5)
    failures = 0
    for _ in range(500):
        g = random_dsl_grammar(rng)
        failures += parse_grammar(serialize_grammar(g)) != g
    dt = time.perf_counter() - t0
    PROPERTY_SECONDS["5e"] = dt
    report("5e DSL round-trip", failures == 0, f"500 grammars, {failures} failures", dt)


def test_5_property_suite_runtime(report):
    missing = {"5a", "5b", "5c", "5d", "5e"} - set(PROPERTY_SECONDS)
    if missing:
        pytest.skip(f"property criteria {sorted(missing)} did not run in this session")
    total = sum(PROPERTY_SECONDS.values())
    report("5 property suite runtime", total < 60.0, "5a-5e combined under 60s", total)


def test_6_end_to_end_sweep(report):
    corpus = DATA / "synthetic_cricket.jsonl"
    n_docs = len(read_corpus([corpus]))
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "approxgram", "sweep", "--corpus", str(corpus), "--rho", "0.30,0.25,0.20,0.15"],
        capture_output=True, text=True, timeout=120,
    )
    dt = time.perf_counter() - t0
    lines = proc.stdout.splitlines()
    rows = [line.split("\t") for line in lines[1:]]
    ok = (
        proc.returncode == 0
        and n_docs >= 200
        and lines[:1] == ["RHO\tPrecision\tRecall"]
        and len(rows) == 4
        and all(len(r) == 3 and 0.0 <= float(r[1]) <= 1.0 and 0.0 <= float(r[2]) <= 1.0 for r in rows)
        and dt < 30.0
    )
    table = " | ".join(" ".join(r) for r in rows)
    report("6 sweep", ok, f"{n_docs} docs, exit {proc.returncode}, rows: {table}", dt)
