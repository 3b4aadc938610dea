"""Command-line pipeline: determinism, persistence, resume, verify."""

import json

import numpy as np
import pytest

from k3g16 import cli


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def base_run(workdir):
    """One quadrics+syzygy run with certificate and resumable state."""
    cert_path = workdir / "base-cert.json"
    state_path = workdir / "base-state.json"
    rc = cli.main(
        [
            "run",
            "--stages",
            "quadrics,syzygy",
            "--out",
            str(cert_path),
            "--save-state",
            str(state_path),
        ]
    )
    assert rc == 0
    return cert_path, state_path


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def test_certificates_are_byte_identical(workdir, base_run):
    cert_path, _ = base_run
    again = workdir / "base-cert-again.json"
    rc = cli.main(["run", "--stages", "quadrics,syzygy", "--out", str(again)])
    assert rc == 0
    assert cert_path.read_bytes() == again.read_bytes()


def test_certificate_shape(base_run):
    cert = read_json(base_run[0])
    assert cert["format"] == "k3g16-certificate"
    assert cert["version"] == 1
    assert cert["config"]["p"] == 101
    assert cert["config"]["rng_seed"] == 0
    assert cert["stages_done"] == ["quadrics", "syzygy"]
    assert cert["mandatory_pass"] is True
    ids = [c["id"] for c in cert["checks"]]
    assert len(ids) == len(set(ids)), "every check id appears exactly once"
    for key in ("seed", "quadric_system", "x_points", "rulings", "pencil", "syzygies", "phi", "t2"):
        assert key in cert["artifacts"]
    for c in cert["checks"]:
        assert set(c) == {"id", "stage", "status", "value", "expected"}


def test_timings_in_sidecar_not_certificate(base_run):
    cert_path, _ = base_run
    cert = read_json(cert_path)
    assert "timings" not in cert
    sidecar = read_json(str(cert_path) + ".timings.json")
    assert set(sidecar) == {"quadrics", "syzygy"}
    assert all(t >= 0 for t in sidecar.values())


def test_state_reloads_into_objects(base_run):
    state = cli.load_state(str(base_run[1]))
    assert state.stages_done == ["quadrics", "syzygy"]
    assert cli._seed(state).p == 101
    assert cli._qs(state).space.dim == 10
    assert cli._syz(state).space.dim == 8
    assert cli._t2(state).flattening() is not None
    assert len(cli._xpoints(state)) == 20


def test_resume_without_new_stages_preserves_checks(workdir, base_run):
    cert_path, state_path = base_run
    out = workdir / "resumed-noop.json"
    rc = cli.main(
        ["resume", "--state", str(state_path), "--stages", "quadrics,syzygy", "--out", str(out)]
    )
    assert rc == 0
    assert read_json(out)["checks"] == read_json(cert_path)["checks"]


def test_resume_matches_monolithic_run(workdir, base_run):
    _, state_path = base_run
    resumed = workdir / "resumed-kummer.json"
    rc = cli.main(["resume", "--state", str(state_path), "--stages", "kummer", "--out", str(resumed)])
    assert rc == 0
    mono = workdir / "mono-kummer.json"
    rc = cli.main(["run", "--stages", "kummer", "--out", str(mono)])
    assert rc == 0
    pick = lambda cert: [c for c in cert["checks"] if c["stage"] == "kummer"]
    cert_a, cert_b = read_json(resumed), read_json(mono)
    assert pick(cert_a) == pick(cert_b)
    assert cert_a["artifacts"]["kummer"] == cert_b["artifacts"]["kummer"]


def test_verify_accepts_good_certificate(base_run, capsys):
    rc = cli.cmd_verify(str(base_run[0]))
    assert rc == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_verify_rejects_tampered_artifact(workdir, base_run, capsys):
    cert = read_json(base_run[0])
    pt = cert["artifacts"]["x_points"][0]["coords"]
    pt[0] = (pt[0] + 1) % 101
    bad = workdir / "tampered.json"
    bad.write_text(cli.dumps_canonical(cert), encoding="utf-8")
    assert cli.cmd_verify(str(bad)) == 1
    assert "FAIL" in capsys.readouterr().out


def test_report_summarizes(base_run, capsys):
    assert cli.cmd_report(str(base_run[0])) == 0
    out = capsys.readouterr().out
    assert "quadrics" in out and "syzygy" in out
    assert "mandatory checks: pass" in out


def test_corrupt_state_is_a_structured_error(workdir):
    bad = workdir / "corrupt.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(cli.StateError, match="cannot read"):
        cli.load_state(str(bad))
    assert cli.main(["resume", "--state", str(bad), "--out", str(workdir / "x.json")]) == 2


def test_wrong_version_and_prime_refused(workdir, base_run):
    data = read_json(base_run[1])
    with pytest.raises(cli.StateError, match="prime"):
        cli.load_state(str(base_run[1]), expect_p=7)
    data["version"] = 99
    stale = workdir / "stale.json"
    stale.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(cli.StateError, match="version"):
        cli.load_state(str(stale))


def test_non_state_file_refused(workdir, base_run):
    with pytest.raises(cli.StateError, match="not a pipeline state"):
        cli.load_state(str(base_run[0]))
    with pytest.raises(cli.StateError, match="not a certificate"):
        cli._load_certificate(str(base_run[1]))


def test_unknown_stage_rejected(workdir):
    with pytest.raises(ValueError, match="unknown stages"):
        cli.plan(["bogus"])
    rc = cli.main(["run", "--stages", "bogus", "--out", str(workdir / "y.json")])
    assert rc == 2


def test_plan_closes_over_dependencies():
    assert cli.plan(["kummer"]) == ["quadrics", "syzygy", "kummer"]
    assert cli.plan(["chow"]) == ["chow"]
    assert cli.plan(cli.STAGES) == list(cli.STAGES)


def test_verbs_and_flags_parse():
    ap = cli._parser()
    ns = ap.parse_args(
        [
            "run",
            "--prime",
            "101",
            "--seed",
            "3",
            "--stages",
            "chow",
            "--out",
            "c.json",
            "--budget-points",
            "10",
            "--budget-retries",
            "4",
            "--budget-degree-cap",
            "20",
            "--budget-anchors",
            "2",
            "--budget-secancy",
            "5",
        ]
    )
    assert (ns.prime, ns.seed, ns.stages) == (101, 3, "chow")
    assert ap.parse_args(["resume", "--state", "s.json"]).verb == "resume"
    assert ap.parse_args(["verify", "c.json"]).verb == "verify"
    assert ap.parse_args(["report", "c.json"]).verb == "report"
    with pytest.raises(SystemExit):
        ap.parse_args(["run", "--bogus"])


def test_probe_failures_do_not_flip_exit():
    state = cli.PipelineState(101, 0, cli.Budgets())
    state.add([{"id": "a", "stage": "probes", "status": "fail", "value": 0, "expected": 1}], "probes")
    assert cli.mandatory_ok(state)
    state.add([{"id": "b", "stage": "chow", "status": "fail", "value": 0, "expected": 1}], "chow")
    assert not cli.mandatory_ok(state)


def test_merge_reports_collapses_and_flags():
    a = [{"id": "x", "stage": "s", "status": "pass", "value": 4, "expected": 4}]
    b = [{"id": "x", "stage": "s", "status": "pass", "value": 4, "expected": 4}]
    merged = cli.merge_reports([a, b])
    assert merged == [{"id": "x", "stage": "s", "status": "pass", "value": 4, "expected": 4}]
    c = [{"id": "x", "stage": "s", "status": "fail", "value": 5, "expected": 4}]
    merged = cli.merge_reports([a, c])
    assert merged[0]["status"] == "fail"
    assert merged[0]["value"] == [4, 5]


def test_canonical_json_coercions():
    out = cli._canon(
        {
            "a": np.int64(3),
            "b": np.bool_(True),
            "c": {np.int64(1), np.int64(2)},
            "d": np.arange(4).reshape(2, 2),
            "e": 2**60,
        }
    )
    assert out == {"a": 3, "b": True, "c": [1, 2], "d": [[0, 1], [2, 3]], "e": str(2**60)}
    text = cli.dumps_canonical({"z": 1, "a": 2})
    assert text.startswith('{"a":2') and text.endswith("\n")


def test_tiny_prime_fails_honestly(workdir):
    out = workdir / "tiny.json"
    rc = cli.main(
        ["run", "--prime", "2", "--stages", "quadrics", "--budget-retries", "2", "--out", str(out)]
    )
    assert rc == 1
    cert = read_json(out)
    assert cert["mandatory_pass"] is False
    assert any(c["status"] == "fail" for c in cert["checks"])
    assert "quadrics" in cert["stages_failed"]
