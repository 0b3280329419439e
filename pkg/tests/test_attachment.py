import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dagdepth import AttachmentSpec, StepSpec, cumulant, mean_step, sample, spec_from_json
from dagdepth.attachment import as_step, cumulant_derivative, sample_array, sample_steps
from dagdepth.errors import DomainError, SpecError
from dagdepth.rng import generator

UNIFORM = AttachmentSpec.uniform()
FAIR = StepSpec.lattice([0, 1], [0.5, 0.5])

STEP_SPECS = [
    StepSpec.exponential(1.0),
    StepSpec.exponential(2.5),
    FAIR,
    StepSpec.lattice([0, 0.5, 3], [0.2, 0.5, 0.3]),
    StepSpec.from_attachment(AttachmentSpec.power_tail(2.0)),
]


@given(seed=st.integers(0, 2**64 - 1), alpha=st.floats(0.05, 50))
@settings(max_examples=50, deadline=None)
def test_samples_lie_in_unit_interval(seed, alpha):
    for spec in (UNIFORM, AttachmentSpec.power_tail(alpha)):
        xs = sample_array(spec, generator(seed), 1000)
        assert xs.min() >= 0.0 and xs.max() < 1.0
        assert 0.0 <= sample(spec, generator(seed)) < 1.0


def test_power_tail_cdf_at_quarter():
    n = 10**6
    xs = sample_array(AttachmentSpec.power_tail(2.0), generator(11), n)
    p = 0.25**2
    sigma = math.sqrt(p * (1 - p) / n)
    assert abs((xs <= 0.25).mean() - p) <= 3 * sigma


def test_power_tail_one_matches_uniform_stream():
    a = sample_array(AttachmentSpec.power_tail(1.0), generator(5), 1000)
    b = sample_array(UNIFORM, generator(5), 1000)
    assert np.array_equal(a, b)


def test_sample_advances_stream_deterministically():
    r1, r2 = generator(9), generator(9)
    first = [sample(UNIFORM, r1) for _ in range(5)]
    assert first == [sample(UNIFORM, r2) for _ in range(5)]
    assert len(set(first)) == 5


def test_spec_fields():
    assert UNIFORM.density_bound == 1 and UNIFORM.tail_exponent == 1 and UNIFORM.mean_log == 1
    p = AttachmentSpec.power_tail(3.0)
    assert p.density_bound == 3.0 and p.tail_exponent == 3.0 and p.mean_log == pytest.approx(1 / 3)
    assert math.isinf(AttachmentSpec.power_tail(0.5).density_bound)


@pytest.mark.parametrize("bad", [
    dict(kind="lattice", support=(0, 1), probs=(0.5, 0.4)),
    dict(kind="lattice", support=(-1, 1), probs=(0.5, 0.5)),
    dict(kind="lattice", support=(0, 1), probs=(1.5, -0.5)),
    dict(kind="lattice", support=(), probs=()),
    dict(kind="exponential", rate=0.0),
    dict(kind="gaussian"),
])
def test_invalid_step_specs(bad):
    with pytest.raises(SpecError):
        StepSpec(**bad)


def test_invalid_attachment_specs():
    with pytest.raises(SpecError):
        AttachmentSpec.power_tail(0.0)
    with pytest.raises(SpecError):
        AttachmentSpec("triangular")


def test_lattice_sum_tolerance():
    StepSpec.lattice([0, 1], [0.5, 0.5 + 5e-13])
    with pytest.raises(SpecError):
        StepSpec.lattice([0, 1], [0.5, 0.5 + 5e-12])


def test_cumulant_examples():
    e1 = StepSpec.exponential(1.0)
    assert cumulant(e1, 0.0) == 0.0
    assert cumulant(e1, 0.5) == pytest.approx(math.log(2), abs=1e-12)
    assert cumulant(FAIR, math.log(3)) == pytest.approx(math.log(2), abs=1e-12)
    for spec in STEP_SPECS:
        assert cumulant(spec, 0.0) == 0.0


def test_cumulant_domain_error():
    with pytest.raises(DomainError):
        cumulant(StepSpec.exponential(1.0), 1.0)
    with pytest.raises(DomainError):
        cumulant(StepSpec.exponential(2.0), 3.0)


def test_mean_step_examples():
    assert mean_step(StepSpec.exponential(1.0)) == 1.0
    assert mean_step(FAIR) == 0.5
    assert mean_step(StepSpec.exponential(2.0)) == 0.5


def test_from_attachment_matches_exponential_in_law():
    for alpha in (1.0, 2.0, 0.5):
        att = AttachmentSpec.power_tail(alpha)
        e = StepSpec.exponential(alpha)
        f = StepSpec.from_attachment(att)
        for lam in (-3.0, -0.5, 0.2 * alpha, 0.9 * alpha):
            assert cumulant(f, lam) == cumulant(e, lam)
        assert mean_step(f) == mean_step(e) == pytest.approx(att.mean_log)
    u = np.random.default_rng(0).random(1000)
    assert np.array_equal(sample_steps(as_step(UNIFORM), u), sample_steps(StepSpec.exponential(1.0), u))


def _domain_hi(spec):
    s = spec.resolved()
    return 0.95 * s.rate if s.kind == "exponential" else 8.0


@pytest.mark.parametrize("spec", STEP_SPECS, ids=lambda s: s.label())
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_cumulant_is_convex(spec, data):
    hi = _domain_hi(spec)
    a = data.draw(st.floats(-8.0, hi))
    b = data.draw(st.floats(-8.0, hi))
    mid = 0.5 * (a + b)
    assert cumulant(spec, mid) <= 0.5 * (cumulant(spec, a) + cumulant(spec, b)) + 1e-10


@pytest.mark.parametrize("spec", STEP_SPECS, ids=lambda s: s.label())
def test_cumulant_slope_at_zero_is_the_mean(spec):
    h = 1e-5
    fd = (cumulant(spec, h) - cumulant(spec, -h)) / (2 * h)
    assert fd == pytest.approx(mean_step(spec), abs=1e-6)
    assert cumulant_derivative(spec, 0.0) == pytest.approx(mean_step(spec), abs=1e-12)


@pytest.mark.parametrize("spec", [UNIFORM, AttachmentSpec.power_tail(2.0), AttachmentSpec.power_tail(0.7)],
                         ids=lambda s: s.label())
def test_empirical_mean_log(spec):
    n = 10**6
    y = -np.log(sample_array(spec, generator(123), n))
    se = y.std(ddof=1) / math.sqrt(n)
    assert abs(y.mean() - spec.mean_log) <= 4 * se


def test_lattice_sampler_frequencies():
    spec = StepSpec.lattice([0, 0.5, 3], [0.2, 0.5, 0.3])
    u = np.random.default_rng(1).random(200_000)
    y = sample_steps(spec, u)
    for s, p in zip(spec.support, spec.probs):
        f = (y == s).mean()
        assert abs(f - p) <= 4 * math.sqrt(p * (1 - p) / u.size)


@pytest.mark.parametrize("obj", [
    {"kind": "uniform"},
    {"kind": "power_tail", "alpha": 2.0},
    {"kind": "exponential", "rate": 1.0},
    {"kind": "lattice", "support": [0.0, 1.0], "probs": [0.5, 0.5]},
    {"kind": "from_attachment", "attachment": {"kind": "power_tail", "alpha": 3.0}},
])
def test_json_round_trip(obj):
    spec = spec_from_json(obj)
    assert spec.to_json() == obj
    assert spec_from_json(spec.to_json()) == spec


def test_lattice_is_sorted():
    spec = StepSpec.lattice([2, 0, 1], [0.1, 0.6, 0.3])
    assert spec.support == (0.0, 1.0, 2.0) and spec.probs == (0.6, 0.3, 0.1)
