import json
import subprocess
import sys

import numpy as np
import pytest

from cryptoherm import kg_metric, matrix_from_doc, matrix_to_doc, read_matrix, write_matrix
from cryptoherm.cli import SCAN_CSV_HEADER, main

EXPECTED_HEADER = "lambda,tau,spectrum_real,max_imag,min_gap,eigvec_cond,metric_exists,theta_min_eig"


def run_cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse flag errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def matrices(tmp_path):
    def write(name, m):
        path = tmp_path / f"{name}.json"
        write_matrix(path, np.asarray(m, dtype=complex), name)
        return str(path)

    return write


# ---------------------------------------------------------------------------
# matrix file format
# ---------------------------------------------------------------------------


def test_matrix_file_roundtrip_is_exact(tmp_path):
    rng = np.random.default_rng(2)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    path = tmp_path / "m.json"
    write_matrix(path, m, "random")
    back = read_matrix(path)
    assert np.array_equal(back, m)


def test_matrix_doc_validation():
    from cryptoherm import MatrixFileError

    with pytest.raises(MatrixFileError):
        matrix_from_doc({"dim": 2, "data": [[[0.0, 0.0]]]})
    with pytest.raises(MatrixFileError):
        matrix_from_doc({"dim": 1, "data": [[[0.0, "x"]]]})
    with pytest.raises(MatrixFileError):
        matrix_from_doc({"dim": 1, "data": [[[True, False]]]})
    with pytest.raises(MatrixFileError):
        matrix_from_doc({"data": [[[0.0, 0.0]]]})


# ---------------------------------------------------------------------------
# diag
# ---------------------------------------------------------------------------


def test_diag_kg_builtin(capsys):
    code, out, _ = run_cli(capsys, "diag", "--kg", "0.3")
    assert code == 0
    report = json.loads(out)
    eigs = [complex(re, im) for re, im in report["eigenvalues"]]
    assert np.allclose(
        sorted(e.real for e in eigs), [-1.3498588075760032, 1.3498588075760032], rtol=1e-12
    )
    assert report["spectrum_real"] is True


def test_diag_identity_file(capsys, matrices):
    code, out, _ = run_cli(capsys, "diag", "--h", matrices("eye", np.eye(3)))
    assert code == 0
    report = json.loads(out)
    assert all(np.isclose(re, 1.0) and im == 0.0 for re, im in report["eigenvalues"])


def test_diag_jordan_block_exits_3(capsys, matrices):
    code, _, err = run_cli(capsys, "diag", "--h", matrices("jordan", [[0, 1], [0, 0]]))
    assert code == 3
    assert err


def test_diag_unparsable_file_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, "diag", "--h", str(bad))
    assert code == 2
    assert err


def test_bad_flags_exit_2(capsys):
    code, _, _ = run_cli(capsys, "diag")
    assert code == 2


# ---------------------------------------------------------------------------
# metric
# ---------------------------------------------------------------------------


def test_metric_with_observable_selects_beta_half(capsys, matrices):
    code, out, err = run_cli(
        capsys, "metric", "--kg", "0.0", "--obs", matrices("obs", [[0, 0], [1, 2]])
    )
    assert code == 0 and err == ""
    report = json.loads(out)
    theta = matrix_from_doc(report["theta"])
    ref = kg_metric(0.0, 0.5).theta
    scale = ref[0, 0].real / theta[0, 0].real
    assert np.linalg.norm(scale * theta - ref) <= 1e-10
    assert report["quasi_hermiticity_residual"] <= 1e-12


def test_metric_without_observables_warns(capsys):
    code, out, _ = run_cli(capsys, "metric", "--kg", "0.5")
    assert code == 0
    report = json.loads(out)
    assert report["warning"] == "family has 1 free ratios"
    assert report["kappa"] == [1.0, 1.0]


def test_metric_underdetermined_exits_5(capsys, matrices):
    # d = a observable compatible with the whole family
    code, _, err = run_cli(
        capsys, "metric", "--kg", "0.0", "--obs", matrices("da", [[2, 1], [1, 2]])
    )
    assert code == 5
    assert err


def test_metric_no_positive_solution_exits_4(capsys, matrices):
    # beta = 3 > 1: compatible line exists but is indefinite
    code, _, err = run_cli(
        capsys, "metric", "--kg", "0.0", "--obs", matrices("far", [[0, 0], [3, 1]])
    )
    assert code == 4
    assert err


# ---------------------------------------------------------------------------
# hermitize
# ---------------------------------------------------------------------------


def test_hermitize_kg_builtin(capsys):
    code, out, _ = run_cli(capsys, "hermitize", "--kg", "0.7", "--beta", "0.2")
    assert code == 0
    report = json.loads(out)
    assert report["hermiticity_defect_rel"] <= 1e-10
    eigs = sorted(re for re, _ in report["eigenvalues"])
    assert np.allclose(eigs, [-np.exp(0.7), np.exp(0.7)], rtol=1e-10)


def test_hermitize_wrong_metric_exits_7(capsys, matrices):
    code, _, err = run_cli(
        capsys,
        "hermitize",
        "--h", matrices("kg1", [[0, np.exp(2.0)], [1, 0]]),
        "--metric", matrices("eye", np.eye(2)),
    )
    assert code == 7
    assert err


def test_hermitize_beta_out_of_range_exits_8(capsys):
    code, _, err = run_cli(capsys, "hermitize", "--kg", "0.0", "--beta", "1.5")
    assert code == 8
    assert err


# ---------------------------------------------------------------------------
# perturb
# ---------------------------------------------------------------------------


def test_perturb_zero_perturbation(capsys, matrices):
    code, out, _ = run_cli(
        capsys,
        "perturb", "--kg", "0.4", "--beta", "0.1",
        "--w", matrices("zero", np.zeros((2, 2))),
        "--order", "2",
    )
    assert code == 0
    report = json.loads(out)
    for doc in report["t_coeffs"]:
        assert np.linalg.norm(matrix_from_doc(doc)) == 0.0
    assert np.linalg.norm(matrix_from_doc(report["delta0"])) == 0.0
    assert report["admissible"] is True


def test_perturb_kg_fixture_matches_library(capsys, matrices):
    from cryptoherm import PerturbationProblem, kg_hamiltonian, metric_series

    w0 = np.array([[0.0, 1.0], [1.0, 0.0]])
    code, out, _ = run_cli(
        capsys,
        "perturb", "--kg", "0.2", "--beta", "0.25",
        "--w", matrices("w0", w0),
        "--order", "2",
    )
    assert code == 0
    report = json.loads(out)
    prob = PerturbationProblem.build(kg_hamiltonian(0.2), kg_metric(0.2, 0.25), [w0], 1e-10)
    series = metric_series(prob, 2)
    for k, doc in enumerate(report["t_coeffs"], start=1):
        assert np.array_equal(matrix_from_doc(doc), series.t_coeffs[k])
    assert report["admissible"] is True


def test_perturb_solvability_violation_exits_6(capsys, matrices):
    code, out, err = run_cli(
        capsys,
        "perturb",
        "--h", matrices("diagH", np.diag([1.0, 2.0])),
        "--metric", matrices("eye", np.eye(2)),
        "--w", matrices("wbad", [[1j, 0], [0, 0]]),
        "--order", "1",
    )
    assert code == 6
    report = json.loads(out)
    assert report["error"] == "SolvabilityViolated"
    assert report["order"] == 1
    assert err


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------


def test_scan_kg_header_and_rows(capsys):
    code, out, err = run_cli(capsys, "scan", "--family", "kg", "--tau", "0:2:21", "--lambda", "0")
    assert code == 0 and err == ""
    lines = out.strip().split("\n")
    assert lines[0] == EXPECTED_HEADER
    assert SCAN_CSV_HEADER == EXPECTED_HEADER
    assert len(lines) == 22
    for line in lines[1:]:
        fields = line.split(",")
        assert fields[2] == "true"  # spectrum_real for every tau
        assert fields[6] == "true"  # metric_exists


def test_scan_rows_reparse_to_full_precision(capsys):
    code, out, _ = run_cli(capsys, "scan", "--family", "kg", "--tau", "0:1:3", "--lambda", "0")
    assert code == 0
    row = out.strip().split("\n")[2]
    tau = float(row.split(",")[1])
    assert tau == 0.5


def test_scan_find_boundary(capsys, matrices):
    h = matrices("h", [[0, 1], [1, 0]])
    w = matrices("w", [[0, -1], [0, 0]])
    code, out, _ = run_cli(
        capsys,
        "scan", "--family", "linear", "--h", h, "--w", w,
        "--lambda", "0:2:41", "--find-boundary", "0:2",
    )
    assert code == 0
    last = out.strip().split("\n")[-1]
    assert last.startswith("# lambda_max,")
    assert abs(float(last.split(",")[1]) - 1.0) <= 1e-8


def test_scan_empty_grid_exits_2(capsys):
    code, _, err = run_cli(capsys, "scan", "--family", "kg", "--tau", "", "--lambda", "0")
    assert code == 2
    assert err


def test_scan_decreasing_grid_exits_2(capsys):
    code, _, err = run_cli(capsys, "scan", "--family", "kg", "--tau", "2,1", "--lambda", "0")
    assert code == 2
    assert err


def test_scan_out_file(capsys, tmp_path):
    out_path = tmp_path / "scan.csv"
    code, out, err = run_cli(
        capsys, "scan", "--family", "kg", "--tau", "0:1:5", "--lambda", "0", "--out", str(out_path)
    )
    assert code == 0 and err == ""
    text = out_path.read_text()
    assert text.startswith(EXPECTED_HEADER)
    assert "wrote 5 rows" in out


# ---------------------------------------------------------------------------
# emitted-matrix round trips and global flags
# ---------------------------------------------------------------------------


def test_emitted_matrices_reparse_bit_consistently(capsys, tmp_path, matrices):
    out_path = tmp_path / "metric.json"
    code, _, _ = run_cli(capsys, "metric", "--kg", "0.4", "--out", str(out_path))
    assert code == 0
    report = json.loads(out_path.read_text())
    theta = matrix_from_doc(report["theta"])
    assert report["theta"] == matrix_to_doc(theta, "theta")


def test_tol_flag_validation(capsys):
    code, _, err = run_cli(capsys, "diag", "--kg", "0.0", "--tol", "0.5")
    assert code == 2
    assert err


def test_scan_thread_env_variants(capsys, monkeypatch):
    expected = None
    for value in (None, "0", "2"):
        if value is None:
            monkeypatch.delenv("CRYPTO_METRIC_THREADS", raising=False)
        else:
            monkeypatch.setenv("CRYPTO_METRIC_THREADS", value)
        code, out, err = run_cli(capsys, "scan", "--family", "kg", "--tau", "0:1:7", "--lambda", "0")
        assert code == 0 and err == ""
        if expected is None:
            expected = out
        else:
            assert out == expected  # parallelism never changes the rows


def test_console_entry_point_module():
    proc = subprocess.run(
        [sys.executable, "-m", "cryptoherm.cli", "diag", "--kg", "0.0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["spectrum_real"] is True
    assert proc.stderr == ""
