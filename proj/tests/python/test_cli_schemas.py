import json

import jsonschema
import pytest

COMMANDS = {
    "simulate": ["--alpha", "0.5", "--n", "50", "--seed", "3", "--format", "json"],
    "summarize": ["--alpha", "0.5", "--n", "2000", "--seed", "3"],
    "taylor": ["--alpha", "0.5", "--n", "20000", "--count", "15", "--seed", "1"],
    "hill": ["--alpha", "0.5", "--n", "2000", "--seed", "2", "--bootstrap", "10", "--format", "json"],
    "fit": ["--alpha", "0.5", "--n", "5000", "--seed", "4", "--family", "gpd", "--threshold", "10",
            "--bootstrap", "20"],
    "probe": ["--process", "ar1", "--n-grid", "100,1000", "--replicates", "20", "--seed", "3", "--format", "json"],
    "diagnose": ["--limit", "variance", "--n-grid", "1000,2000", "--replicates", "3", "--seed", "3",
                 "--format", "json"],
    "network": ["--mode", "decorrelation", "--n", "200", "--replicates", "50", "--pairs", "2", "--seed", "1"],
}


def validate(doc, schema):
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(doc, schema)


@pytest.mark.parametrize("command", sorted(COMMANDS))
def test_report_and_run_record_match_schemas(cli, schemas, tmp_path, command):
    out = tmp_path / f"{command}.json"
    cli(command, *COMMANDS[command], "-o", out)
    report = json.loads(out.read_text())
    validate(report, schemas[command])
    assert "threads" not in report["config"]

    record = json.loads((tmp_path / f"{command}.json.run.json").read_text())
    validate(record, schemas["run"])
    assert record["command"] == command
    assert record["seed"] == report["seed"]
    assert record["outputs"][0].endswith(f"{command}.json")


def test_network_taylor_mode(cli, schemas):
    proc = cli("network", "--mode", "taylor", "--n-grid", "100,1000", "--replicates", "5", "--seed", "2")
    doc = json.loads(proc.stdout)
    validate(doc, schemas["network"])
    assert [s["n"] for s in doc["sizes"]] == [100, 1000]


def test_ingest_matches_schema(cli, schemas, tmp_path):
    edges = tmp_path / "edges.txt"
    edges.write_text("# toy\n1\t2\n1\t3\n2\t3\n4\t1\n")
    doc = json.loads(cli("ingest", "--format", "snap", "--drop-zeros", edges).stdout)
    validate(doc, schemas["ingest"])
    assert doc["n"] == 3 and doc["graph"]["edges"] == 4


def test_schema_rejects_a_broken_report(cli, schemas):
    doc = json.loads(cli("fit", *COMMANDS["fit"]).stdout)
    doc["family"] = "lognormal"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, schemas["fit"])
    del doc["config"]["seed"]
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, schemas["fit"])


def test_seed_from_environment(cli):
    proc = cli("simulate", "--n", "10", "--format", "json", env={"TAYLORLAW_SEED": "77"})
    assert json.loads(proc.stdout)["seed"] == 77
    assert "seed: 77" in proc.stderr


def test_bad_parameters_exit_2(cli):
    assert cli("simulate", "--alpha", "-1", "--n", "5", check=False).returncode == 2
    assert cli("diagnose", "--limit", "variance", "--limit-alpha", "1.5", "--n-grid", "100",
               check=False).returncode == 2
