import itertools
import json
import subprocess
import sys

import numpy as np
import pytest

from iamsr.cli import main
from iamsr.cluster import ClusterError, node_path, open_cluster, reconstruct_cluster, repair_cluster, fail_node
from iamsr.storage import ManifestError


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def payload(tmp_path):
    path = tmp_path / "in.bin"
    path.write_bytes(np.random.default_rng(9).bytes(3001))
    return path


def encode(capsys, cluster, inp, *extra):
    code, out, err = run(capsys, "encode", "--input", inp, "--cluster", cluster, "--seed", 3, *extra)
    assert code == 0, err
    return out


def test_secure_scenario_end_to_end(tmp_path, payload, capsys):
    c = tmp_path / "c"
    encode(capsys, c, payload, "--k", 3, "--secure", "--l1", 1, "--l2", 1)
    code, out, _ = run(capsys, "verify-secrecy", "--cluster", c, "--e1", 1, "--e2", 3)
    assert code == 0 and "perfect: true" in out

    before = node_path(c, 2).read_bytes()
    assert run(capsys, "fail", "--cluster", c, "--node", 2)[0] == 0
    code, out, _ = run(capsys, "repair", "--cluster", c, "--node", 2)
    assert code == 0 and "downloaded 5 symbols/stripe" in out and "suboptimal" not in out
    assert node_path(c, 2).read_bytes() == before

    out_file = tmp_path / "out.bin"
    assert run(capsys, "reconstruct", "--cluster", c, "--nodes", "4,5,6", "--output", out_file)[0] == 0
    assert out_file.read_bytes() == payload.read_bytes()


def test_parity_repair_reports_fallback(tmp_path, payload, capsys):
    c = tmp_path / "c"
    encode(capsys, c, payload, "--k", 3)
    before = node_path(c, 5).read_bytes()
    run(capsys, "fail", "--cluster", c, "--node", 5)
    code, out, _ = run(capsys, "repair", "--cluster", c, "--node", 5)
    assert code == 0 and "downloaded 9 symbols/stripe" in out and "suboptimal fallback" in out
    assert node_path(c, 5).read_bytes() == before


def test_plain_systematic_read(tmp_path, payload, capsys):
    c = tmp_path / "c"
    encode(capsys, c, payload, "--k", 3)
    out_file = tmp_path / "o"
    run(capsys, "reconstruct", "--cluster", c, "--nodes", "1,2,3", "--output", out_file)
    assert out_file.read_bytes() == payload.read_bytes()


@pytest.mark.parametrize("k, secure", [(2, False), (2, True), (3, False), (3, True)])
def test_full_pipeline_every_failure_and_subset(tmp_path, capsys, k, secure):
    data = np.random.default_rng(k).bytes(257)
    inp = tmp_path / "in"
    inp.write_bytes(data)
    c = tmp_path / "c"
    encode(capsys, c, inp, "--k", k, *(["--secure", "--l1", 1, "--l2", 0] if secure else []))
    cluster = open_cluster(c)
    originals = {m: node_path(c, m).read_bytes() for m in range(1, 2 * k + 1)}
    for failed in range(1, 2 * k + 1):
        fail_node(cluster, failed)
        report = repair_cluster(cluster, failed)
        assert report.optimal == (failed <= k)
        assert node_path(c, failed).read_bytes() == originals[failed]
        for ids in itertools.combinations(range(1, 2 * k + 1), k):
            assert reconstruct_cluster(cluster, ids) == data


def test_node_files_are_deterministic(tmp_path, payload, capsys):
    for name in ("a", "b"):
        encode(capsys, tmp_path / name, payload, "--k", 2, "--secure", "--l1", 1, "--l2", 0)
    for m in range(1, 5):
        assert node_path(tmp_path / "a", m).read_bytes() == node_path(tmp_path / "b", m).read_bytes()


@pytest.mark.parametrize("args", [
    ["--k", 3, "--q", 7],
    ["--k", 3, "--q", 256],
    ["--k", 3, "--epsilon", 1],
    ["--k", 3, "--secure", "--l1", 2, "--l2", 1],
    ["--k", 3, "--secure", "--l1", 1, "--l2", 1, "--e2", 5],
    ["--k", 4, "--worked-example-psi"],
    ["--k", 1],
])
def test_invalid_encode_writes_nothing(tmp_path, payload, capsys, args):
    c = tmp_path / "c"
    code, out, err = run(capsys, "encode", "--input", payload, "--cluster", c, *args)
    assert code != 0 and err.startswith("error: ") and len(err.strip().splitlines()) == 1
    assert not c.exists()


def test_worked_example_psi_symbolic(tmp_path, capsys):
    inp = tmp_path / "s.txt"
    inp.write_text("1 2 3 4 5 6 0 1 2 3 4")
    c = tmp_path / "c"
    encode(capsys, c, inp, "--k", 3, "--paper-psi")  # accepted alias
    m = open_cluster(c).manifest
    assert (m.q, m.psi_xs, m.psi_ys, m.payload) == (7, (0, 1, 2), (4, 5, 6), "symbols")
    out_file = tmp_path / "o"
    run(capsys, "reconstruct", "--cluster", c, "--nodes", "1,5,6", "--output", out_file)
    assert out_file.read_text().split() == inp.read_text().split()


def test_eavesdrop_dump(tmp_path, payload, capsys):
    c = tmp_path / "c"
    encode(capsys, c, payload, "--k", 3, "--secure", "--l1", 1, "--l2", 1)
    dump = tmp_path / "e.json"
    assert run(capsys, "eavesdrop", "--cluster", c, "--e1", 1, "--e2", 3, "--dump", dump, "--stripe", 1)[0] == 0
    d = json.loads(dump.read_text())
    assert d["stripe"] == 1 and len(d["values"]) == 8 and len(d["matrix"]) == 8
    H = np.array(d["matrix"])
    assert H.shape == (8, 9) and np.linalg.matrix_rank(H) <= 9
    assert run(capsys, "eavesdrop", "--cluster", c, "--e1", 1, "--dump", dump, "--stripe", 10 ** 6)[0] != 0


def test_verify_reports_leak_for_unplanned_taps(tmp_path, payload, capsys):
    # layout was built for e1={1}; a repair tap on node 2 is outside the model
    c = tmp_path / "c"
    encode(capsys, c, payload, "--k", 3, "--secure", "--l1", 1, "--l2", 0)
    code, out, _ = run(capsys, "verify-secrecy", "--cluster", c, "--e1", 2, "--e2", 1)
    assert code == 1 and "perfect: false" in out


def test_verify_exhaustive_small(tmp_path, capsys):
    inp = tmp_path / "s.txt"
    inp.write_text("1 2")
    c = tmp_path / "c"
    encode(capsys, c, inp, "--k", 2, "--symbols", "--secure", "--l1", 1, "--l2", 0)
    code, out, _ = run(capsys, "verify-secrecy", "--cluster", c, "--e1", 1, "--exhaustive", "--max-states", 625)
    assert code == 0 and "identical distributions" in out


def test_corruption_is_detected(tmp_path, payload, capsys):
    c = tmp_path / "c"
    encode(capsys, c, payload, "--k", 2)
    raw = bytearray(node_path(c, 3).read_bytes())
    raw[-1] ^= 1
    node_path(c, 3).write_bytes(bytes(raw))
    code, _, err = run(capsys, "reconstruct", "--cluster", c, "--nodes", "1,3", "--output", tmp_path / "o")
    assert code != 0 and "checksum" in err
    (c / "manifest.txt").write_text((c / "manifest.txt").read_text().replace("k=2", "k=5"))
    with pytest.raises(ManifestError):
        open_cluster(c)


def test_repair_needs_missing_node(tmp_path, payload, capsys):
    c = tmp_path / "c"
    encode(capsys, c, payload, "--k", 2)
    with pytest.raises(ClusterError):
        repair_cluster(open_cluster(c), 1)


def test_analyze_writes_csv(tmp_path, capsys):
    out = tmp_path / "bw.csv"
    assert run(capsys, "analyze", "bandwidth", "--kmax", 30, "--out", out)[0] == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 30 and lines[2].startswith("3,3,5,")
    code, text, _ = run(capsys, "analyze", "secrecy", "--k", 30, "--l1", 1)
    assert code == 0 and len(text.splitlines()) == 29


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and "known erratum" in out and "oracle" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "iamsr", "analyze", "bandwidth", "--kmax", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[1] == "2,2,3,4,3"


@pytest.mark.parametrize("script", ["worked_example.py", "secrecy_walkthrough.py", "tradeoff_tables.py"])
def test_demo_scripts_run(script):
    from pathlib import Path
    path = Path(__file__).resolve().parent.parent / "demos" / script
    res = subprocess.run([sys.executable, str(path)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
