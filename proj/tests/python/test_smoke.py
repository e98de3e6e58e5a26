import json
import os
import pathlib
import xml.etree.ElementTree as ET

import pytest

import tracelayout as tl

FIXTURES = pathlib.Path(
    os.environ.get("TRACELAYOUT_FIXTURES", pathlib.Path(__file__).resolve().parents[1] / "fixtures")
)


@pytest.fixture(scope="module")
def ertms():
    inst = tl.parse_instance_xml((FIXTURES / "ertms.xml").read_text())
    spec = tl.parse_spec((FIXTURES / "ertms.json").read_text())
    return inst, spec


def test_instance_model(ertms):
    inst, _ = ertms
    assert inst.state_order("State") == ["State$0", "State$1"]
    assert inst.element_order("VSS") == [f"VSS${i}" for i in range(5)]
    assert inst.fields()["vss"]["arity"] == 3
    proj = inst.project("State", "State$0")
    assert sorted(map(tuple, proj["vss"])) == [("Train$0", "VSS$1"), ("Train$1", "VSS$0")]


def test_validate(ertms):
    inst, spec = ertms
    diags = tl.validate_spec(spec, inst)
    assert [d["code"] for d in diags] == ["default-random"]
    assert len(spec.entries) == 3
    assert spec.entries[0]["layout"] == "Linear"


def test_layout_geometry(ertms):
    inst, spec = ertms
    scene = tl.layout(spec, inst, project="State", atom="State$0")
    ttd0, ttd1 = scene.find("TTD$0"), scene.find("TTD$1")
    assert ttd0["y"] == pytest.approx(ttd1["y"], abs=0.01)
    xs = [scene.find(f"VSS${i}")["x"] for i in range(5)]
    assert xs == sorted(xs)
    assert scene.find("Train$0")["x"] == pytest.approx(scene.find("VSS$1")["x"], abs=0.01)
    assert scene.find("Nobody$0") is None
    assert json.loads(scene.to_json())["state"] == "State$0"


def test_svg(ertms):
    inst, spec = ertms
    scene = tl.layout(spec, inst, project="State")
    svg, warnings = scene.to_svg([str(FIXTURES)])
    assert warnings == []
    root = ET.fromstring(svg.encode())
    assert root.tag.endswith("svg")
    _, missing = scene.to_svg()
    assert len(missing) == 9


def test_transition_and_bundle(ertms):
    inst, spec = ertms
    s0 = tl.layout(spec, inst, project="State", atom="State$0")
    s1 = tl.layout(spec, inst, project="State", atom="State$1")
    delta = tl.diff(s0, s1)
    assert set(delta["moved"]) == {"Train$0", "Train$1"}
    plan = tl.plan(s0, s1, manager="animation", duration_ms=1000, fps=4)
    assert plan.manager == "animation"
    assert [k["t_ms"] for k in plan.keyframes] == [0, 250, 500, 750, 1000]
    for k in plan.keyframes:
        assert k["nodes"]["Train$0"]["y"] == pytest.approx(s0.find("Train$0")["y"])
    text = tl.build_bundle([s0, s1], [plan], [str(FIXTURES)])
    bundle = json.loads(text)
    assert bundle["version"] == "1"
    assert bundle["states"] == ["State$0", "State$1"]
    assert sorted(bundle["assets"]) == ["rail.png", "train.png"]
    assert tl.canonical_bundle(text) == text


def test_errors(ertms):
    inst, spec = ertms
    with pytest.raises(tl.SpecError):
        tl.parse_spec('[{"sig":"A","layout":"Spiral"}]')
    with pytest.raises(tl.ParseError):
        tl.parse_instance_xml("<alloy><instance>")
    with pytest.raises(tl.DomainError):
        tl.layout(spec, inst, project="State", atom="Train$0")
    with pytest.raises(tl.BundleError):
        tl.canonical_bundle('{"version":"9"}')
    assert issubclass(tl.ApplicabilityError, tl.TraceLayoutError)
    assert issubclass(tl.TraceLayoutError, RuntimeError)


def test_run_matches_cli_contract():
    code, out, err = tl.run("states", str(FIXTURES / "ertms.xml"), project="State")
    assert code == 0
    assert out == b"State$0\nState$1\n"
    code, out, _ = tl.run(
        "animate", str(FIXTURES / "ertms.xml"), str(FIXTURES / "ertms.json"), project="State", fps=4
    )
    assert code == 0
    assert len(json.loads(out)["plans"][0]["keyframes"]) == 5
    code, _, err = tl.run("render", str(FIXTURES / "missing.xml"), str(FIXTURES / "ertms.json"))
    assert code == 2
    assert "missing.xml" in err
