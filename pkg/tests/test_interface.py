"""The two delivery surfaces — CLI and HTTP — and the guarantee that they
serialize the same answers to the same bytes."""

import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient

from inverse_learn.cli import main
from inverse_learn.serialize import ENGINE_VERSION
from inverse_learn.service import create_app

from conftest import TABLE2_BOUNDS_CSV, TABLE2_FOODS_CSV, make_ex1

EX1_OBS_CSV = "x1,x2\n9,9\n11,9\n10,8\n"


@pytest.fixture()
def paths(tmp_path, ex1):
    """Instance + observation files for CLI runs."""
    inst = tmp_path / "inst.json"
    inst.write_text(ex1.to_json())
    obs = tmp_path / "obs.csv"
    obs.write_text(EX1_OBS_CSV)
    return {"inst": str(inst), "obs": str(obs), "dir": tmp_path}


@pytest.fixture()
def client(ex1):
    with TestClient(create_app()) as tc:
        yield tc


def _register(client, ex1):
    iid = client.post("/instances", json=ex1.to_dict()).json()["id"]
    r = client.post(f"/observations?instance={iid}", content=EX1_OBS_CSV)
    return iid, r.json()["id"]


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def test_cli_validate(paths, capsys):
    assert main(["validate", "--instance", paths["inst"]]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["feasible"] is True
    assert doc["m1"] == 5 and doc["m2"] == 2
    assert doc["preferred"] == ["G3"]


def test_cli_validate_rejects_zero_rows(tmp_path, table2_instance, capsys):
    path = tmp_path / "diet.json"
    path.write_text(table2_instance.to_json())
    assert main(["validate", "--instance", str(path)]) == 2
    assert "MALFORMED" in capsys.readouterr().err


def test_cli_solve_closest_boundary(paths, capsys):
    rc = main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
               "--method", "alg1"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["z"] == [10.0, 9.0]
    assert doc["distance"] == 3.0
    assert doc["binding"] == ["G5"]
    assert doc["status"] == "OK"
    assert doc["engine_version"] == ENGINE_VERSION
    assert doc["id"].startswith("sol-")


def test_cli_solve_il(paths, capsys):
    rc = main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
               "--method", "il", "--p", "2"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["z"] == [10.0, 10.0]
    assert doc["binding"] == ["G4", "G5"]
    assert doc["distance"] == 6.0


def test_cli_solve_writes_failures_before_exiting(paths, capsys):
    out = str(paths["dir"] / "sol.json")
    rc = main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
               "--method", "il", "--p", "3", "--out", out])
    assert rc == 3
    assert "INFEASIBLE_AT_P" in capsys.readouterr().err
    doc = json.loads(open(out).read())
    assert doc["status"] == "INFEASIBLE_AT_P"
    assert doc["z"] is None


def test_cli_solve_mil_with_preferred_override(tmp_path, capsys):
    bare = make_ex1(preferred=())
    inst = tmp_path / "bare.json"
    inst.write_text(bare.to_json())
    obs = tmp_path / "obs.csv"
    obs.write_text(EX1_OBS_CSV)
    rc = main(["solve", "--instance", str(inst), "--observations", str(obs),
               "--method", "mil", "--p", "2", "--omega2", "5",
               "--preferred", "G3"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["z"] == [8.0, 12.0]
    assert doc["preferred_bound_count"] == 1


def test_cli_bil_by_name_matches_by_index(paths, capsys):
    assert main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
                 "--method", "bil", "--row", "G5"]) == 0
    by_name = capsys.readouterr().out
    assert main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
                 "--method", "bil", "--j", "4"]) == 0
    assert capsys.readouterr().out == by_name


def test_cli_input_errors_exit_2(paths, tmp_path, capsys):
    # missing --p
    assert main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
                 "--method", "il"]) == 2
    # unknown row name
    assert main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
                 "--method", "bil", "--row", "NOPE"]) == 2
    # observation header does not match the instance
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["solve", "--instance", paths["inst"], "--observations", str(bad),
                 "--method", "alg1"]) == 2
    # unreadable file
    assert main(["validate", "--instance", str(tmp_path / "missing.json")]) == 2
    capsys.readouterr()


def test_cli_sweep(paths, capsys):
    rc = main(["sweep", "--instance", paths["inst"], "--observations", paths["obs"],
               "--p-min", "1", "--p-max", "2", "--independent"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mode"] == "independent"
    assert [pt["p"] for pt in doc["points"]] == [1, 2]
    assert [pt["status"] for pt in doc["points"]] == ["OK", "OK"]
    assert doc["id"].startswith("frontier-")


def test_cli_sweep_with_no_solutions_exits_3(tmp_path, table2_instance, capsys):
    inst = tmp_path / "diet.json"
    inst.write_text(table2_instance.to_json())
    obs = tmp_path / "obs.csv"
    obs.write_text("Milk,Stew,Bread\n1,1,1\n")
    rc = main(["sweep", "--instance", str(inst), "--observations", str(obs),
               "--p-min", "1", "--p-max", "2", "--independent"])
    assert rc == 3
    out, err = capsys.readouterr()
    assert "no sweep point" in err
    doc = json.loads(out)  # the frontier is still written
    assert [pt["status"] for pt in doc["points"]] == ["INFEASIBLE_AT_P"] * 2


def test_cli_infer_cost_from_point_and_from_solution(paths, capsys):
    sol_path = str(paths["dir"] / "sol.json")
    assert main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
                 "--method", "il", "--p", "2", "--out", sol_path]) == 0
    assert main(["infer-cost", "--instance", paths["inst"],
                 "--observations", paths["obs"], "--z", "10,10"]) == 0
    by_point = capsys.readouterr().out
    doc = json.loads(by_point)
    assert doc["c"][0] == pytest.approx(0.7556890827898176)
    assert doc["lambda"]["G4"] == pytest.approx(0.6549305384178418)
    assert doc["lambda"]["G5"] == pytest.approx(0.10075854437197572)
    assert doc["avg_objective"] == pytest.approx(13.232955494186138)
    assert doc["exactness"] == "PROJECTION"
    assert main(["infer-cost", "--instance", paths["inst"],
                 "--observations", paths["obs"], "--solution", sol_path]) == 0
    assert capsys.readouterr().out == by_point


def test_cli_infer_cost_interior_point_exits_3(paths, capsys):
    rc = main(["infer-cost", "--instance", paths["inst"],
               "--observations", paths["obs"], "--z", "5,5"])
    assert rc == 3
    assert "EMPTY_CONE" in capsys.readouterr().err


def test_cli_stats(paths, capsys):
    assert main(["stats", "--observations", paths["obs"]]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "variable,p10,p25,p50,p75,p90"
    assert lines[1].startswith("x1,")
    assert main(["stats", "--observations", paths["obs"],
                 "--percentiles", "50", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["percentiles"] == [50.0]
    assert doc["engine_version"] == ENGINE_VERSION
    assert main(["stats", "--observations", paths["obs"],
                 "--percentiles", "5,200"]) == 2
    capsys.readouterr()


def test_cli_diet_build_and_report(tmp_path, capsys):
    foods = tmp_path / "foods.csv"
    foods.write_text(TABLE2_FOODS_CSV)
    bounds = tmp_path / "bounds.csv"
    bounds.write_text(TABLE2_BOUNDS_CSV)
    inst_path = str(tmp_path / "diet.json")
    assert main(["diet", "build", "--foods", str(foods), "--bounds", str(bounds),
                 "--out", inst_path]) == 0
    doc = json.loads(open(inst_path).read())
    assert len(doc["constraints"]) == 28
    capsys.readouterr()

    # report on the empty three-food region: files are written, exit is 3
    obs = tmp_path / "obs.csv"
    obs.write_text("Milk,Stew,Bread\n1,1,1\n2,0.5,3\n")
    outdir = tmp_path / "report"
    rc = main(["diet", "report", "--instance", inst_path, "--observations", str(obs),
               "--outdir", str(outdir), "--p-min", "1", "--p-max", "2"])
    assert rc == 3
    out, err = capsys.readouterr()
    assert "no sweep point" in err
    produced = {line.rsplit("/", 1)[-1] for line in out.splitlines() if line}
    assert "frontier_summary.csv" in produced
    assert (outdir / "frontier.json").exists()
    assert (outdir / "frontier_distance.svg").exists()


def test_cli_diet_report_on_a_solvable_instance(tmp_path, synthetic_diet, capsys):
    foods, bounds, obs, inst = synthetic_diet
    inst_path = tmp_path / "diet.json"
    inst_path.write_text(inst.to_json())
    obs_path = tmp_path / "obs.csv"
    obs_path.write_text(obs.to_csv())
    outdir = tmp_path / "report"
    rc = main(["diet", "report", "--instance", str(inst_path),
               "--observations", str(obs_path), "--outdir", str(outdir),
               "--p-min", "1", "--p-max", "2"])
    assert rc == 0
    capsys.readouterr()
    frontier = json.loads((outdir / "frontier.json").read_text())
    assert [pt["status"] for pt in frontier["points"]] == ["OK", "OK"]
    for name in ("frontier_summary.csv", "recommended_servings.csv",
                 "nutrient_totals.csv", "observation_percentiles.csv",
                 "frontier_distance.svg", "servings_vs_observations.svg"):
        assert (outdir / name).exists(), name


def test_cli_report_rejects_non_diet_instances(paths, capsys):
    rc = main(["diet", "report", "--instance", paths["inst"],
               "--observations", paths["obs"], "--outdir", str(paths["dir"] / "x")])
    assert rc == 2
    assert "diet instance" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# HTTP
# ---------------------------------------------------------------------------


def test_http_instance_registration_is_idempotent(client, ex1):
    first = client.post("/instances", json=ex1.to_dict())
    second = client.post("/instances", json=ex1.to_dict())
    assert first.status_code == second.status_code == 200
    assert first.json()["id"] == second.json()["id"]
    assert first.json()["id"].startswith("inst-")
    assert first.json()["engine_version"] == ENGINE_VERSION


def test_http_instance_round_trip(client, ex1):
    iid, _ = _register(client, ex1)
    doc = client.get(f"/instances/{iid}").json()
    assert doc["id"] == iid
    assert doc["variables"] == ["x1", "x2"]
    assert len(doc["constraints"]) == 7


def test_http_unknown_ids_404(client):
    r = client.get("/instances/inst-ffffffffffffffff")
    assert r.status_code == 404
    assert r.json()["error"] == "NOT_FOUND"
    r = client.post("/solve", json={"instance": "inst-x", "observations": "obs-x",
                                    "method": "alg1"})
    assert r.status_code == 404


def test_http_garbage_requests_400(client, ex1):
    iid, oid = _register(client, ex1)
    r = client.post(f"/observations?instance={iid}", content="a,b\n1,2\n")
    assert r.status_code == 400
    assert r.json()["error"] == "MALFORMED"
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "warp"})
    assert r.status_code == 400
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "il"})  # no p
    assert r.status_code == 400
    r = client.post("/solve", content=b"{not json",
                    headers={"content-type": "application/json"})
    assert r.status_code == 400


def test_http_solve(client, ex1):
    iid, oid = _register(client, ex1)
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "il", "p": 2})
    assert r.status_code == 200
    doc = r.json()
    assert doc["z"] == [10.0, 10.0]
    assert doc["binding"] == ["G4", "G5"]
    assert doc["engine_version"] == ENGINE_VERSION


def test_http_solver_misses_are_422(client, ex1):
    iid, oid = _register(client, ex1)
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "il", "p": 3})
    assert r.status_code == 422
    assert r.json()["status"] == "INFEASIBLE_AT_P"


def test_http_status_errors_are_422(client, table2_instance):
    iid = client.post("/instances", json=table2_instance.to_dict()).json()["id"]
    oid = client.post(f"/observations?instance={iid}",
                      content="Milk,Stew,Bread\n1,1,1\n").json()["id"]
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "alg1"})
    assert r.status_code == 422
    body = r.json()
    assert body["error"] == body["status"] == "ALL_INFEASIBLE"


def test_http_preferred_override(client, ex1):
    iid, oid = _register(client, ex1)
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "mil", "p": 2, "omega2": 5.0,
                                    "preferred": ["G3"]})
    assert r.json()["z"] == [8.0, 12.0]
    assert r.json()["preferred_bound_count"] == 1


def test_http_solve_extras(client, ex1):
    iid, oid = _register(client, ex1)
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "il", "p": 2,
                                    "include_cost": True, "include_activity": True})
    doc = r.json()
    assert doc["cost"]["lambda"]["G4"] == pytest.approx(0.6549305384178418)
    assert len(doc["activity"]["relevant_slacks"]) == 5
    assert len(doc["activity"]["trivial_slacks"]) == 2
    assert doc["activity"]["relevant_slacks"][3] == pytest.approx(0.0)


def test_http_stats(client, ex1):
    _, oid = _register(client, ex1)
    r = client.get(f"/observations/{oid}/stats?percentiles=50,90")
    doc = r.json()
    assert doc["percentiles"] == [50.0, 90.0]
    assert doc["variables"] == ["x1", "x2"]
    r = client.get(f"/observations/{oid}/stats?percentiles=pony")
    assert r.status_code == 400


def test_http_frontier(client, ex1):
    iid, oid = _register(client, ex1)
    r = client.post("/frontier", json={"instance": iid, "observations": oid,
                                       "p_min": 1, "p_max": 3, "mode": "dependent"})
    doc = r.json()
    assert doc["mode"] == "dependent"
    assert [pt["status"] for pt in doc["points"]] == ["OK", "OK", "TERMINATED"]


def test_http_infer_cost_by_id_matches_inline(client, ex1):
    iid, oid = _register(client, ex1)
    sol = client.post("/solve", json={"instance": iid, "observations": oid,
                                      "method": "il", "p": 2}).json()
    by_id = client.post("/infer-cost", json={"solution": sol["id"]})
    inline = client.post("/infer-cost", json={"instance": iid, "observations": oid,
                                              "z": [10.0, 10.0]})
    assert by_id.status_code == inline.status_code == 200
    assert by_id.content == inline.content
    assert by_id.json()["c"][0] == pytest.approx(0.7556890827898176)


def test_http_infer_cost_unknown_solution_404(client):
    assert client.post("/infer-cost", json={"solution": "sol-beef"}).status_code == 404


def test_http_infer_cost_interior_is_422(client, ex1):
    iid, oid = _register(client, ex1)
    r = client.post("/infer-cost", json={"instance": iid, "observations": oid,
                                         "z": [5.0, 5.0]})
    assert r.status_code == 422
    assert r.json()["error"] == "EMPTY_CONE"


def test_http_concurrent_identical_solves_agree(client, ex1):
    iid, oid = _register(client, ex1)
    body = {"instance": iid, "observations": oid, "method": "il", "p": 2}

    def hit(_):
        return client.post("/solve", json=body)

    with ThreadPoolExecutor(max_workers=8) as pool:
        responses = list(pool.map(hit, range(16)))
    assert all(r.status_code == 200 for r in responses)
    assert len({r.content for r in responses}) == 1


def test_http_cors_preflight(client):
    r = client.options("/solve", headers={
        "origin": "http://localhost:5173",
        "access-control-request-method": "POST",
    })
    assert r.headers.get("access-control-allow-origin") == "*"


# ---------------------------------------------------------------------------
# the byte-identity contract between the two surfaces
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("method,extra_cli,extra_http", [
    ("alg1", [], {}),
    ("il", ["--p", "2"], {"p": 2}),
    ("il", ["--p", "3"], {"p": 3}),  # failure documents match too
    ("seq", ["--p", "2"], {"p": 2}),
    ("mil", ["--p", "2", "--omega2", "5"], {"p": 2, "omega2": 5.0}),
])
def test_solution_bytes_match_across_surfaces(paths, client, ex1,
                                              method, extra_cli, extra_http):
    out = str(paths["dir"] / "sol.json")
    main(["solve", "--instance", paths["inst"], "--observations", paths["obs"],
          "--method", method, "--out", out] + extra_cli)
    cli_bytes = open(out, "rb").read()

    iid, oid = _register(client, ex1)
    r = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": method, **extra_http})
    assert r.content == cli_bytes


def test_frontier_bytes_match_across_surfaces(paths, client, ex1):
    out = str(paths["dir"] / "frontier.json")
    main(["sweep", "--instance", paths["inst"], "--observations", paths["obs"],
          "--p-min", "1", "--p-max", "3", "--dependent", "--out", out])
    cli_bytes = open(out, "rb").read()
    iid, oid = _register(client, ex1)
    r = client.post("/frontier", json={"instance": iid, "observations": oid,
                                       "p_min": 1, "p_max": 3, "mode": "dependent"})
    assert r.content == cli_bytes


def test_cost_bytes_match_across_surfaces(paths, client, ex1):
    out = str(paths["dir"] / "cost.json")
    main(["infer-cost", "--instance", paths["inst"], "--observations", paths["obs"],
          "--z", "10,10", "--out", out])
    cli_bytes = open(out, "rb").read()
    iid, oid = _register(client, ex1)
    r = client.post("/infer-cost", json={"instance": iid, "observations": oid,
                                         "z": [10, 10]})
    assert r.content == cli_bytes


def test_solution_ids_are_content_hashes(client, ex1):
    iid, oid = _register(client, ex1)
    a = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "il", "p": 2}).json()
    b = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "il", "p": 2}).json()
    c = client.post("/solve", json={"instance": iid, "observations": oid,
                                    "method": "il", "p": 1}).json()
    assert a["id"] == b["id"]
    assert a["id"] != c["id"]
