import json

from growthlab.main import main, run
from growthlab.dto import ResultRecord
from growthlab.repositories.result_repo import RESULTS_FILE, deterministic_line, read_records


def test_growth_prints_csv(capsys):
    assert main(["growth", "--model", "f2", "--gens", "a,b", "--depth", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["n,sphere,ball", "0,1,1", "1,4,5", "2,12,17", "3,36,53"]


def test_growth_writes_results(tmp_path):
    assert run(["growth", "--model", "fp:2,3", "--depth", "4", "--out", str(tmp_path)]) == 0
    records = read_records(tmp_path / RESULTS_FILE)
    assert len(records) == 1
    record = records[0]
    assert record["command"] == "growth"
    assert record["payload"]["table"]["ball"] == [1, 4, 8, 14, 22]
    assert "shards" not in record["config"]["run"]
    assert record["constants"]["m"] == 844
    assert (tmp_path / "growth.csv").read_text(encoding="utf-8").startswith("n,sphere,ball\n")
    perf_files = list(tmp_path.glob("perf_*.json"))
    assert len(perf_files) == 1
    summary = json.loads(perf_files[0].read_text(encoding="utf-8"))
    assert [s["step"] for s in summary["steps"]][-1] == "done"


def test_records_do_not_depend_on_shards(tmp_path):
    assert run(["growth", "--depth", "5", "--shards", "1", "--out", str(tmp_path)]) == 0
    assert run(["growth", "--depth", "5", "--shards", "8", "--out", str(tmp_path)]) == 0
    first, second = (ResultRecord.model_validate(r) for r in read_records(tmp_path / RESULTS_FILE))
    assert first.runtime.shards != second.runtime.shards
    assert deterministic_line(first) == deterministic_line(second)


def test_json_line_without_table(capsys):
    assert run(["delta", "--model", "f2", "--radius", "2", "--samples", "20"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["payload"]["delta_estimate"] == "0"
    assert record["payload"]["within_declared"] is True


def test_malformed_words_exit_one(capsys):
    assert run(["growth", "--gens", "a,x"]) == 1
    assert "position 2" in capsys.readouterr().err


def test_usage_errors_exit_one():
    assert run(["growth", "--no-such-flag"]) == 1
    assert run([]) == 1


def test_construction_failure_exits_two():
    assert run(["find-hyperbolic", "--model", "fp:2,3", "--gens", "s"]) == 2


def test_audit_failure_exit_code(capsys):
    assert run(["audit", "--gens", "a,A"]) == 2
    record = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert record["payload"]["audit"]["failed_stage"] == "non-elementarity"


def test_config_file_wins(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\ndepth = 2\n", encoding="utf-8")
    out = tmp_path / "out"
    assert run(["growth", "--depth", "6", "--config", str(ini), "--out", str(out)]) == 0
    assert read_records(out / RESULTS_FILE)[0]["payload"]["table"]["ball"] == [1, 5, 17]


def test_spectrum_plot(tmp_path):
    assert run(["xi-scan", "--depth", "3", "--max-cardinality", "2", "--max-length", "1", "--out", str(tmp_path), "--plot"]) == 0
    assert (tmp_path / "xi-scan.csv").exists()
    assert (tmp_path / "xi-scan.svg").read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_stable_kernel_command(capsys):
    code = run(["stable-kernel", "--model", "free:1", "--images", "a; a^n", "--length-cap", "2", "--horizon", "4"])
    assert code == 0
    record = json.loads(capsys.readouterr().out)
    statuses = {row["word"]: row["status"] for row in record["payload"]["report"]["rows"]}
    assert statuses["a"] == "eventually_nontrivial"


def test_memory_limit_exits_with_one(capsys):
    assert run(["growth", "--depth", "4", "--memory-limit-mb", "0.001"]) == 1
    assert "memory limit" in capsys.readouterr().err
