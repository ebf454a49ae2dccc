import io
import json
import logging

import pytest
from pydantic import ValidationError

from app.exceptions import (
    InvalidArgumentError,
    InvariantViolation,
    MathPreconditionError,
    SupportConditionError,
    handle_exception,
)
from app.logging_config import setup_logging
from main import main

P_JSON = '{"type": "finite", "pmf": {"1": 0.125, "2": 0.75, "3": 0.125}}'
Q_JSON = '{"type": "finite", "pmf": {"0": 0.0625, "1": 0.125, "2": 0.625, "3": 0.125, "4": 0.0625}}'


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def error_body(err: str) -> dict:
    # El cuerpo de error es la última línea de stderr (antes pueden ir logs)
    return json.loads(err.strip().splitlines()[-1])


# =========================================================
# COMANDOS
# =========================================================

def test_zeta_json(capsys):
    code, out, _ = run_cli(capsys, "zeta", P_JSON)

    assert code == 0
    report = json.loads(out)
    assert report["zeta_cm"] == pytest.approx(0.870, abs=5e-4)
    assert report["eta_circ"] == pytest.approx(1 / 3, abs=1e-8)


def test_zeta_csv_and_global_option_before_command(capsys):
    code, out, _ = run_cli(capsys, "--format", "csv", "zeta", Q_JSON)

    assert code == 0
    header, row = out.strip().splitlines()
    assert header.split(",")[:3] == ["zeta_cm", "eta_circ", "eta_root_gf"]
    assert float(row.split(",")[0]) == pytest.approx(0.892, abs=5e-4)


def test_zeta_thinning(capsys):
    _, full, _ = run_cli(capsys, "zeta", P_JSON, "--thin", "1")
    _, plain, _ = run_cli(capsys, "zeta", P_JSON)
    assert full == plain

    code, out, _ = run_cli(capsys, "zeta", '{"type": "poisson", "lambda": 4.0}', "--thin", "0.5")
    assert code == 0
    assert json.loads(out)["zeta_cm"] == pytest.approx(0.7968, abs=1e-4)


def test_zeta_of_thinned_spec_matches_thin_option(capsys):
    mpoi = '{"type": "mpoi", "mixing": {"type": "pareto", "alpha": 1.5, "scale": 1.0}}'
    thinned = '{"type": "thinned", "r": 0.6, "base": %s}' % mpoi

    code, lazy, _ = run_cli(capsys, "zeta", thinned)
    _, option, _ = run_cli(capsys, "zeta", mpoi, "--thin", "0.6")

    assert code == 0
    assert json.loads(lazy)["zeta_cm"] == pytest.approx(json.loads(option)["zeta_cm"], abs=1e-12)
    assert json.loads(lazy)["zeta_cm"] == pytest.approx(0.5805, abs=1e-3)


def test_dist_file_and_out(capsys, tmp_path):
    spec = tmp_path / "p.json"
    spec.write_text(P_JSON, encoding="utf-8")
    target = tmp_path / "zeta.json"

    code, out, _ = run_cli(capsys, "zeta", "--dist-file", str(spec), "--out", str(target))

    assert code == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["zeta_cm"] == pytest.approx(0.870, abs=5e-4)


def test_counterexample_table(capsys):
    code, out, _ = run_cli(capsys, "counterexample")

    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,p,q,p_circ,q_circ"
    assert lines[1] == "mean,2.000,2.000,1.125,1.375"
    assert lines[3] == "extinction_probability,0.000,0.076,0.333,0.186"
    assert lines[4] == "zeta_cm,0.870,0.892,,"


def test_counterexample_json(capsys):
    code, out, _ = run_cli(capsys, "counterexample", "--format", "json")
    assert code == 0
    assert json.loads(out)["columns"] == ["p", "q", "p_circ", "q_circ"]


def test_bounds(capsys):
    code, out, _ = run_cli(capsys, "bounds", P_JSON)

    assert code == 0
    report = json.loads(out)
    assert report["mean_half"] == 1.0
    assert report["crude2"] == pytest.approx(0.9921875)
    assert report["crude3"] == pytest.approx(0.921875)


def test_bounds_without_crude3(capsys):
    code, out, _ = run_cli(capsys, "bounds", '{"type": "finite", "pmf": {"2": 1.0}}')
    assert code == 0
    assert json.loads(out)["crude3"] is None


def test_order_verdicts(capsys):
    code, out, _ = run_cli(capsys, "order", P_JSON, Q_JSON, "--relation", "cx")
    assert code == 0
    assert json.loads(out) == {"relation": "cx", "holds": True, "witness": None, "semi_decision": False}

    code, out, _ = run_cli(capsys, "order", P_JSON, Q_JSON, "--relation", "st")
    verdict = json.loads(out)
    assert code == 0
    assert not verdict["holds"]
    assert verdict["witness"]["point"] == 0


def test_order_chain(capsys):
    code, out, _ = run_cli(capsys, "order", Q_JSON, P_JSON, "--relation", "icv", "--chain")

    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"]["holds"]
    assert payload["chain"]["violations"] == []
    assert set(payload["chain"]["verdicts"]) == {"st", "cv", "icv", "lt"}


def test_order_truncates_parametric_laws(capsys):
    code, out, _ = run_cli(
        capsys, "order", '{"type": "poisson", "lambda": 1.0}', '{"type": "poisson", "lambda": 2.0}',
        "--relation", "st",
    )
    assert code == 0
    assert json.loads(out)["holds"]


def test_lambda_cr(capsys):
    code, out, _ = run_cli(capsys, "lambda-cr", "--tol", "1e-8")
    assert code == 0
    assert json.loads(out)["lambda_cr"] == pytest.approx(2.3130, abs=1e-4)


def test_sweep_csv(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--family", "binomial", "--lambdas", "1.5,2", "--grid", "3,10")

    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "family,lambda,param,zeta_cm"
    assert len(lines) == 5
    assert lines[1].startswith("binomial,1.5,3,")


def test_sweep_json(capsys):
    code, out, _ = run_cli(
        capsys, "sweep", "--family", "pareto_mpoi", "--lambdas", "2", "--grid", "3", "--format", "json",
    )
    assert code == 0
    (row,) = json.loads(out)
    assert row["lambda"] == 2.0
    assert row["param"] == 3.0


def test_simulate(capsys, tmp_path):
    dump = tmp_path / "edges.txt"
    code, out, _ = run_cli(
        capsys, "simulate", P_JSON, "--n", "200", "--reps", "2", "--seed", "3", "--dump", str(dump),
    )

    assert code == 0
    stats = json.loads(out)
    assert stats["n"] == 200
    assert len(stats["fractions"]) == 2
    assert stats["predicted_zeta"] == pytest.approx(0.870, abs=5e-4)
    edges = [tuple(map(int, line.split())) for line in dump.read_text(encoding="utf-8").splitlines()]
    assert edges
    assert all(1 <= u <= 200 and 1 <= v <= 200 for u, v in edges)


def test_simulate_csv_is_reproducible(capsys):
    _, first, _ = run_cli(capsys, "simulate", Q_JSON, "--n", "100", "--reps", "3", "--seed", "5", "--format", "csv")
    _, second, _ = run_cli(capsys, "simulate", Q_JSON, "--n", "100", "--reps", "3", "--seed", "5", "--format", "csv")

    assert first == second
    assert first.splitlines()[0] == "replicate,fraction"
    assert len(first.splitlines()) == 4


# =========================================================
# ERRORES Y CÓDIGOS DE SALIDA
# =========================================================

def test_invalid_json_exits_with_two(capsys):
    code, out, err = run_cli(capsys, "zeta", "{not json")

    assert code == 2
    assert out == ""
    assert error_body(err)["type"] == "parse_error"


def test_invalid_pmf_exits_with_two(capsys):
    code, _, err = run_cli(capsys, "zeta", '{"type": "finite", "pmf": {"1": 0.5}}')

    assert code == 2
    body = error_body(err)
    assert body["type"] == "validation_error"
    assert body["details"]


def test_missing_spec_exits_with_two(capsys):
    code, _, err = run_cli(capsys, "zeta")
    assert code == 2
    assert error_body(err)["type"] == "validation_error"


def test_missing_dist_file_exits_with_two(capsys, tmp_path):
    code, _, err = run_cli(capsys, "zeta", "--dist-file", str(tmp_path / "missing.json"))
    assert code == 2
    assert error_body(err)["type"] == "io_error"


def test_zero_mean_exits_with_three(capsys):
    code, _, err = run_cli(capsys, "zeta", '{"type": "finite", "pmf": {"0": 1.0}}')

    assert code == 3
    body = error_body(err)
    assert body["type"] == "math_error"
    assert body["context"]["mean"] == 0.0


def test_infinite_mean_error_body_is_valid_json(capsys):
    def reject(constant):
        raise ValueError(f"constante no JSON: {constant}")

    code, _, err = run_cli(capsys, "zeta", '{"type": "mpoi", "mixing": {"type": "pareto", "alpha": 0.5, "scale": 1.0}}')

    assert code == 3
    body = json.loads(err.strip().splitlines()[-1], parse_constant=reject)
    assert body["context"]["mean"] == "inf"


@pytest.mark.parametrize("seed", ["-1", str(2 ** 64)])
def test_seed_out_of_range_exits_with_two(seed):
    with pytest.raises(SystemExit) as exc_info:
        main(["simulate", P_JSON, "--n", "10", "--seed", seed])
    assert exc_info.value.code == 2


def test_negative_default_seed_exits_with_two(capsys, monkeypatch):
    from app.config import settings

    monkeypatch.setattr(settings, "default_seed", -1)
    code, _, err = run_cli(capsys, "simulate", P_JSON, "--n", "10")

    assert code == 2
    assert error_body(err)["type"] == "validation_error"


def test_argparse_errors_exit_with_two():
    with pytest.raises(SystemExit) as exc_info:
        main(["order", P_JSON, Q_JSON])
    assert exc_info.value.code == 2

    with pytest.raises(SystemExit):
        main(["zeta", P_JSON, "--thin", "1.5"])


@pytest.mark.parametrize("exc, code, kind", [
    (InvalidArgumentError("r fuera de rango"), 2, "validation_error"),
    (MathPreconditionError("media nula"), 3, "math_error"),
    (SupportConditionError("c < 2"), 3, "math_error"),
    (InvariantViolation("conclusión violada"), 4, "invariant_violation"),
    (FileNotFoundError(2, "No such file", "x.json"), 2, "io_error"),
    (RuntimeError("boom"), 1, "internal_error"),
])
def test_handle_exception(exc, code, kind):
    stream = io.StringIO()
    assert handle_exception(exc, stream) == code
    assert json.loads(stream.getvalue())["type"] == kind


def test_handle_validation_error():
    from app.schemas.distribution import parse_distribution

    with pytest.raises(ValidationError) as exc_info:
        parse_distribution('{"type": "binomial", "n": 3, "p": 1.5}')

    stream = io.StringIO()
    assert handle_exception(exc_info.value, stream) == 2
    assert json.loads(stream.getvalue())["type"] == "validation_error"


def test_setup_logging_is_idempotent():
    root = setup_logging("info")
    handlers = len(root.handlers)

    setup_logging("warning")

    assert len(root.handlers) == handlers
    assert root.level == logging.WARNING
