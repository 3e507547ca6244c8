from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from dynring.engine import SimulationConfig, run

ALLOWED = {
    "search": {"search", "settled", "forward", "bounce", "terminated"},
    "settled": {"settled", "terminated"},
    "forward": {"forward", "terminated"},
    "bounce": {"bounce", "return", "terminated"},
    "return": {"return", "bounce", "terminated"},
}

adversaries = st.one_of(
    st.just({"kind": "none"}),
    st.just({"kind": "gap_keeper"}),
    st.builds(lambda t: {"kind": "front_blocker", "target": t}, st.integers(0, 2)),
    st.builds(lambda s, p: {"kind": "random", "seed": s, "p_none": p}, st.integers(0, 2**32), st.sampled_from([0.0, 0.5, 0.9])),
)


@st.composite
def full_configs(draw, mode=None):
    n = draw(st.integers(3, 9))
    k = draw(st.sampled_from([2, 3]))
    # all-zero identifiers are exercised by the acceptance grid; see the README
    ids = draw(st.permutations([format(v, f"0{k}b") for v in range(1, 2**k)]))[:3]
    mode = mode or draw(st.sampled_from(["chiral", "achiral"]))
    orient = (True,) * 3 if mode == "chiral" else tuple(draw(st.lists(st.booleans(), min_size=3, max_size=3)))
    positions = tuple(draw(st.lists(st.integers(0, n - 1), min_size=3, max_size=3)))
    return SimulationConfig(
        n=n,
        ids=tuple(ids),
        positions=positions,
        orientations=orient,
        mode=mode,
        adversary=draw(adversaries),
        trace_level="full",
    )


def _check_roles(trace):
    last = {}
    for rec in trace:
        settled = 0
        for a in rec["agents"]:
            i, s = a["index"], a["state"]
            if i in last:
                assert s in ALLOWED[last[i]], f"agent {i}: {last[i]} -> {s} at round {rec['round']}"
            last[i] = s
            settled += s == "settled"
        assert settled <= 1


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(full_configs(mode="chiral"))
def test_chiral_runs_succeed_and_respect_roles(cfg):
    out, trace = run(cfg)
    assert out.violation is None
    assert out.ok, out.to_json()
    _check_roles(trace)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(full_configs(mode="achiral"))
def test_achiral_runs_succeed_and_respect_roles(cfg):
    cfg.trace_level = "summary"
    out, _ = run(cfg)
    assert out.violation is None
    assert out.ok, out.to_json()


@settings(max_examples=30, deadline=None)
@given(full_configs())
def test_meeting_within_bound(cfg):
    cfg.protocol = "meeting"
    cfg.trace_level = "summary"
    out, _ = run(cfg)
    assert out.first_meeting_round is not None and out.first_meeting_round <= out.bound


@settings(max_examples=20, deadline=None)
@given(full_configs())
def test_runs_are_deterministic(cfg):
    assert run(cfg) == run(cfg)
