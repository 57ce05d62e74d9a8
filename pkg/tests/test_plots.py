import hashlib
import json
import xml.etree.ElementTree as ET
from pathlib import Path


from richlines.esfamily import PlanarConfig
from richlines.experiments import ExperimentReport, run_census, run_partition_sweep, run_quadruple_scaling
from richlines.plots import emit_plots

GOLDEN = Path(__file__).parent / "golden"
UNIT_SQUARE = PlanarConfig(((0, 0), (1, 0), (0, 1), (1, 1)))


def _sha(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def test_empty_report_gives_empty_axes(tmp_path):
    (svg,) = emit_plots(ExperimentReport("census"), tmp_path)
    assert svg.name == "empty.svg"
    ET.parse(svg)


def test_unit_square_census_golden(tmp_path):
    files = emit_plots(run_census(UNIT_SQUARE, label="unit square"), tmp_path)
    names = sorted(f.name for f in files)
    assert names == ["census.svg", "instances.csv"]
    assert (tmp_path / "census.svg").read_bytes() == (GOLDEN / "census_unit_square.svg").read_bytes()
    assert (tmp_path / "instances.csv").read_text() == (GOLDEN / "census_unit_square.csv").read_text()


def test_scaling_golden(tmp_path):
    rep = run_quadruple_scaling([4, 9, 16, 25])
    files = emit_plots(rep, tmp_path)
    assert {f.name for f in files} == {"scaling.svg", "rich.svg", "instances.csv"}
    assert _sha(tmp_path / "scaling.svg") == _sha(GOLDEN / "scaling.svg")


def test_plots_are_byte_deterministic(tmp_path):
    rep = run_partition_sweep([200], [2, 4])
    a = emit_plots(rep, tmp_path / "a")
    b = emit_plots(ExperimentReport.from_json(json.loads(json.dumps(rep.to_json()))), tmp_path / "b")
    assert [_sha(x) for x in a] == [_sha(y) for y in b]
