import json

import numpy as np
import pytest

from unitarity_kit.cli import main
from unitarity_kit.schmidt import schmidt_rank


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def gen(capsys, tmp_path, kind, *params, seed=None):
    path = tmp_path / f"{kind}_{'_'.join(params)}.json"
    argv = ["gen", kind, *params, "--out", str(path)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    code, _, _ = run(capsys, argv)
    assert code == 0
    return str(path)


def test_gen_local_then_classify(capsys, tmp_path):
    path = gen(capsys, tmp_path, "local", "3", "3", seed=7)
    code, out, _ = run(capsys, ["classify", path, "--json"])
    assert code == 0
    report = json.loads(out)
    assert report["verdict"]["kind"] == "Local"
    assert report["verdict"]["reconstruction_error"] <= 1e-8
    assert report["quantitative"]["E1"]["preserved"] is False  # generic factors
    assert report["tolerances"]["tol"] == 1e-8


def test_gen_swap_local_then_classify(capsys, tmp_path):
    path = gen(capsys, tmp_path, "swap_local", "2", "3", seed=9)
    code, out, _ = run(capsys, ["classify", path, "--json"])
    assert code == 0
    report = json.loads(out)
    assert report["verdict"]["kind"] == "SwapLocal"
    assert report["verdict"]["output_shape"] == [3, 2]


def test_classify_cnot_prints_witness(capsys, tmp_path):
    path = gen(capsys, tmp_path, "cnot")
    code, out, _ = run(capsys, ["classify", path])
    assert code == 3
    assert "NotPreserving" in out
    assert "0.707106781" in out  # witness image Schmidt coefficients


def test_classify_report_witness_reverifies(capsys, tmp_path):
    path = gen(capsys, tmp_path, "cnot")
    code, out, _ = run(capsys, ["classify", path, "--json"])
    assert code == 3
    report = json.loads(out)
    witness = report["verdict"]["witness"]
    state = np.array([complex(re, im) for re, im in witness["state"]])
    shape = tuple(witness["evidence"]["input_shape"])
    assert schmidt_rank(state, shape) == witness["evidence"]["input_rank"] == 1
    with open(path, encoding="utf-8") as fh:
        matrix = np.array(
            [[complex(re, im) for re, im in row] for row in json.load(fh)["matrix"]]
        )
    image = matrix @ state
    image_shape = tuple(witness["evidence"]["image_shape"])
    assert schmidt_rank(image, image_shape) == witness["evidence"]["image_rank"] == 2


def test_malformed_json_exits_1(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json}")
    code, _, err = run(capsys, ["classify", str(path)])
    assert code == 1
    assert "error" in err


def test_wrong_kind_exits_1(capsys, tmp_path):
    path = gen(capsys, tmp_path, "bell")
    code, _, _ = run(capsys, ["classify", path])
    assert code == 1


def test_dimension_mismatch_exits_2(capsys, tmp_path):
    path = tmp_path / "dim.json"
    path.write_text(
        json.dumps(
            {"kind": "bipartite_map", "shape": [2, 2], "matrix": [[[1.0, 0.0]] * 3] * 3}
        )
    )
    code, _, err = run(capsys, ["classify", str(path)])
    assert code == 2
    assert "dimension" in err


def test_schmidt_on_bell_state(capsys, tmp_path):
    path = gen(capsys, tmp_path, "bell")
    code, out, _ = run(capsys, ["schmidt", path])
    assert code == 0
    assert "rank: 2" in out
    assert out.count("0.707106781") == 2


def test_schmidt_bases_flag(capsys, tmp_path):
    path = gen(capsys, tmp_path, "bell")
    code, out, _ = run(capsys, ["schmidt", path, "--bases"])
    assert code == 0
    assert "left vectors" in out and "right vectors" in out


def test_schmidt_shape_flag_overrides(capsys, tmp_path):
    path = gen(capsys, tmp_path, "bell")
    code, out, _ = run(capsys, ["schmidt", path, "--shape", "2", "2", "--json"])
    assert code == 0
    assert json.loads(out)["rank"] == 2


def test_measure_commands(capsys, tmp_path):
    bell = gen(capsys, tmp_path, "bell")
    code, out, _ = run(capsys, ["measure", bell, "--measure", "E"])
    assert code == 0 and out.strip() == "1.000000000"
    code, out, _ = run(capsys, ["measure", bell, "--measure", "E2"])
    assert code == 0 and out.strip() == "1.000000000"

    probe = gen(capsys, tmp_path, "psi_c", "0.6", "2", "2")
    code, out, _ = run(capsys, ["measure", probe, "--measure", "E"])
    assert code == 0 and out.strip() == "0.942683189"

    product = gen(capsys, tmp_path, "psi_c", "1.0", "2", "2")
    code, out, _ = run(capsys, ["measure", product, "--measure", "E"])
    assert code == 0 and out.strip() == "0.000000000"


def test_schmidt_scalar_shape_needs_flag(capsys, tmp_path):
    path = tmp_path / "scalar_state.json"
    path.write_text(
        json.dumps({"kind": "state", "shape": 4, "matrix": [[0.5, 0.0]] * 4})
    )
    code, _, _ = run(capsys, ["schmidt", str(path)])
    assert code == 2
    code, out, _ = run(capsys, ["schmidt", str(path), "--shape", "2", "2"])
    assert code == 0 and "rank:" in out


def test_measure_E_requires_normalized_state(capsys, tmp_path):
    path = tmp_path / "unnormalized.json"
    path.write_text(
        json.dumps({"kind": "state", "shape": [2, 2], "matrix": [[2.0, 0.0]] + [[0.0, 0.0]] * 3})
    )
    code, _, _ = run(capsys, ["measure", str(path), "--measure", "E"])
    assert code == 1
    code, out, _ = run(capsys, ["measure", str(path), "--measure", "E1"])
    assert code == 0 and out.strip() == "0.000000000"
    code, out, _ = run(capsys, ["measure", str(path), "--measure", "E2"])
    assert code == 0 and out.strip() == "0.000000000"


def test_verify_entropy_wrong_kind_exits_1(capsys, tmp_path):
    path = gen(capsys, tmp_path, "cnot")
    code, _, _ = run(capsys, ["verify-entropy", path])
    assert code == 1


def test_verify_entropy_unitary(capsys, tmp_path):
    path = gen(capsys, tmp_path, "superop_unitary", "3", seed=5)
    code, out, _ = run(capsys, ["verify-entropy", path, "--json"])
    assert code == 0
    report = json.loads(out)
    assert report["verdict"]["kind"] == "UnitaryConjugation"
    assert abs(report["verdict"]["gain"] - 1.0) <= 1e-9


def test_verify_entropy_transpose(capsys, tmp_path):
    path = gen(capsys, tmp_path, "superop_transpose", "2")
    code, out, _ = run(capsys, ["verify-entropy", path])
    assert code == 0
    assert "AntiunitaryConjugation" in out


def test_verify_entropy_depolarizer(capsys, tmp_path):
    path = gen(capsys, tmp_path, "superop_depolarize", "2")
    code, out, _ = run(capsys, ["verify-entropy", path, "--json"])
    assert code == 3
    witness = json.loads(out)["verdict"]["witness"]
    assert abs(witness["entropy_out"] - 0.8112781244591328) <= 1e-6


def test_gen_unitary_is_generically_rejected(capsys, tmp_path):
    path = gen(capsys, tmp_path, "unitary", "2", "2", seed=21)
    code, out, _ = run(capsys, ["classify", path, "--json"])
    assert code == 3
    assert json.loads(out)["verdict"]["witness"] is not None


def test_gen_bad_arguments_exit_1(capsys, tmp_path):
    code, _, _ = run(capsys, ["gen", "psi_c", "1.5", "2", "2"])
    assert code == 1
    code, _, _ = run(capsys, ["gen", "local", "3"])
    assert code == 1
    code, _, _ = run(capsys, ["gen", "nonsense", "2"])
    assert code == 1


def test_gen_without_out_prints_document(capsys):
    code, out, _ = run(capsys, ["gen", "bell"])
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "state" and data["shape"] == [2, 2]


def test_seed_env_override(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("UNITARITY_KIT_SEED", "31")
    path = gen(capsys, tmp_path, "local", "2", "2")
    code, out, _ = run(capsys, ["classify", path, "--json"])
    assert code == 0
    assert json.loads(out)["seed"] == 31


def test_seed_flag_beats_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("UNITARITY_KIT_SEED", "31")
    path = gen(capsys, tmp_path, "local", "2", "2", seed=5)
    code, out, _ = run(capsys, ["classify", path, "--json", "--seed", "6"])
    assert code == 0
    assert json.loads(out)["seed"] == 6


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "exit codes" in out
    assert "2 dimension error" in out
