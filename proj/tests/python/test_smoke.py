import json
import math
import os
import random

import jsonschema
import pytest

import fpprep

SCHEMA = os.environ.get(
    "FPPREP_SCHEMA",
    os.path.join(os.path.dirname(__file__), "..", "..", "docs", "report.schema.json"),
)


def test_decompose_round_trip():
    a = fpprep.decompose(53.333)
    assert a.sign == 0
    assert a.unbiased_exponent == 5
    assert fpprep.compose(a) == fpprep.from_bits(fpprep.to_bits(53.333))
    assert fpprep.trailing_zero_count(256.0) == 23


def test_unsupported_value_raises():
    with pytest.raises(fpprep.Error) as info:
        fpprep.decompose(0.0)
    assert info.value.code


def test_addition_round_trip_within_half_precision():
    rng = random.Random(3)
    x = [rng.uniform(10.0, 20.0) for _ in range(200)]
    plan = fpprep.select_addition_parameter(x, fpprep.ErrorBound.relative(0.01))
    back = fpprep.invert_addition(fpprep.apply_addition(x, plan), plan)
    xf = [fpprep.from_bits(fpprep.to_bits(v)) for v in x]
    assert max(abs(b - v) for b, v in zip(back, xf)) <= plan.predicted_bound
    assert all(abs(b - v) / v <= 0.01 for b, v in zip(back, xf))


def test_worked_addition_example():
    plan = fpprep.addition_plan_for_exponent([1.5], 23)
    y = fpprep.apply_addition([1.5], plan)
    assert fpprep.decompose(y[0]).unbiased_exponent == 23
    assert abs(fpprep.invert_addition(y, plan)[0] - 1.5) <= 0.5


def test_pattern_and_substitutions():
    p = fpprep.pattern_for(13)
    assert p.canonical_hex() == "0x9d8"
    assert p.block * 13 == (1 << p.length) - 1
    subs = fpprep.enumerate_substitutions(19.6, 13, fpprep.ErrorBound.unbounded())
    assert any(s.product == 256.0 and s.trailing_zeros == 23 for s in subs)
    for s in subs:
        assert fpprep.from_bits(fpprep.to_bits(s.substituted * 13)) == s.product


def test_multiplication_plan():
    x = [363.754, 366.0]
    plan = fpprep.select_multiplication_parameter(x, fpprep.ErrorBound.relative(1e-4))
    assert plan.min_common_zeros >= 16
    y = fpprep.apply_multiplication(x, plan)
    back = fpprep.invert_multiplication(y, plan.m)
    assert all(abs(b - v) / v <= 1e-4 for b, v in zip(back, x))


def test_gd_round_trip():
    words = [fpprep.to_bits(1000.0 + i / 8) for i in range(100)]
    blob = fpprep.gd_compress(words, fpprep.choose_base_bits(words))
    assert isinstance(blob, bytes)
    assert fpprep.gd_decompress(blob) == words
    with pytest.raises(fpprep.Error):
        fpprep.gd_decompress(b"junk")


def test_transform_csv_respects_bound():
    rows = ["t"] + [f"{20 + 5 * math.sin(i / 10):.3f}" for i in range(300)]
    out = fpprep.transform_csv("\n".join(rows), fpprep.ErrorBound.relative(0.01))
    assert out[0]["kind"] in ("addition", "multiplication")
    assert out[0]["max_rel"] <= 0.01


def test_bench_report_matches_schema():
    rows = ["a,b"] + [f"{10 + i * 0.37:.2f},{i % 7}" for i in range(200)]
    report = json.loads(
        fpprep.bench_csv("\n".join(rows), fpprep.ErrorBound.relative(0.01),
                         compressors=["builtin", "cmd:gzip -6"])
    )
    with open(SCHEMA) as f:
        jsonschema.validate(report, json.load(f))
    assert [c["name"] for c in report["columns"]] == ["a", "b"]
    assert report["global"]["max_rel_error"] <= 0.01
    assert "timing" not in report
