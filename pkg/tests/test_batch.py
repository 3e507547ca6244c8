import json

import pytest

from dynring.batch import expand, failure_reason, load_manifest, place, run_batch
from dynring.engine import ConfigError, SimulationConfig, run

SMALL = {
    "name": "small",
    "mode": "achiral",
    "n": {"min": 3, "max": 4},
    "id_sets": [{"k": 2, "all": True}],
    "orientations": "all",
    "placements": ["distinct", "three_together"],
    "adversaries": [{"kind": "none"}, {"kind": "front_blocker", "target": "each"}, {"kind": "random", "seeds": 2}],
}


def test_expand_cross_product():
    cells = expand(SMALL)
    # 2 sizes x 4 triples x 2 placements x 8 orientations x 6 adversaries
    assert len(cells) == 2 * 4 * 2 * 8 * 6
    assert [c.index for c in cells] == list(range(len(cells)))
    seeds = {c.config.adversary["seed"] for c in cells if c.config.adversary["kind"] == "random"}
    assert seeds == {0, 1}
    assert {c.config.adversary.get("target") for c in cells if c.config.adversary["kind"] == "front_blocker"} == {0, 1, 2}


def test_expand_is_deterministic_and_seeded():
    a = [c.config for c in expand(SMALL)]
    assert a == [c.config for c in expand(SMALL)]
    m = {**SMALL, "id_sets": [{"k": 3, "random": 5}]}
    assert [c.config.ids for c in expand(m)] != [c.config.ids for c in expand(m, seed_override=7)]


def test_placements():
    assert len(set(place("distinct", 5, ("01", "10", "11"), 0))) == 3
    two = place("two_together", 5, ("01", "10", "11"), 0)
    assert len(set(two)) == 2
    assert len(set(place("three_together", 5, ("01", "10", "11"), 0))) == 1
    with pytest.raises(ConfigError):
        place("scattered", 5, ("01", "10", "11"), 0)


def test_multiplier_sets_round_cap():
    cells = expand(SMALL, multiplier=0.001)
    assert all(c.config.max_rounds == max(1, int(0.001 * c.config.bound)) for c in cells)


@pytest.mark.parametrize(
    "manifest",
    [{}, {"mode": "chiral"}, {**SMALL, "id_sets": []}, {**SMALL, "adversaries": []}, {**SMALL, "placements": ["x"]}],
)
def test_invalid_manifests(manifest):
    with pytest.raises(ConfigError):
        expand(manifest)


def test_chiral_campaign_rejects_mixed_orientations():
    with pytest.raises(ConfigError):
        expand({**SMALL, "mode": "chiral"})


def test_run_batch_report():
    m = {**SMALL, "id_sets": [{"triples": [["01", "10", "11"]]}]}
    report = run_batch(m, jobs=1)
    assert report["cells"] == len(report["results"]) == 2 * 2 * 8 * 6
    assert report["failed"] == 0 and report["passed"] == report["cells"]
    assert set(report["by_size"]) == {"n=3,k=2", "n=4,k=2"}


def test_parallel_matches_serial():
    m = {**SMALL, "id_sets": [{"triples": [["01", "10", "11"]]}], "placements": ["distinct"]}
    assert run_batch(m, jobs=2) == run_batch(m, jobs=1)


def test_scripted_campaign(tmp_path):
    (tmp_path / "blocks.txt").write_text("0\n1\n2\nnone\n")
    doc = {
        "name": "scripted",
        "mode": "chiral",
        "n": 5,
        "id_sets": [{"triples": [["01", "10", "11"]]}],
        "adversaries": [{"kind": "scripted", "path": "blocks.txt", "cycle": True}],
    }
    (tmp_path / "m.json").write_text(json.dumps(doc))
    report = run_batch(load_manifest(tmp_path / "m.json"), jobs=1)
    assert report["cells"] == 1 and report["failed"] == 0


def test_failure_reasons():
    out, _ = run(SimulationConfig(n=5, ids=("01", "10", "11"), positions=(0, 1, 3), max_rounds=2))
    assert failure_reason(out) == "not_explored" or failure_reason(out) == "not_terminated"
    out, _ = run(SimulationConfig(n=5, ids=("01", "10", "11"), positions=(0, 1, 3)))
    assert failure_reason(out) is None
