import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewjensen import cli
from skewjensen import divergences as dv
from skewjensen.errors import ConfigurationError, DomainError, ParseError
from skewjensen.io import (
    IngestionConfig,
    intensity_histogram,
    load_histograms,
    load_labeled,
    load_matrix,
    save_histograms,
    smooth,
    to_json,
)

SHANNON_14 = (5 + np.sqrt(73)) / 6


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestConfig:
    def test_defaults(self):
        c = IngestionConfig()
        assert (c.epsilon, c.normalization_tol, c.bins) == (1e-9, 1e-9, 256)

    def test_invalid(self):
        with pytest.raises(ConfigurationError):
            IngestionConfig(epsilon=0)
        with pytest.raises(ConfigurationError):
            IngestionConfig(bins=1)
        with pytest.raises(ConfigurationError):
            IngestionConfig(normalization_tol=-1)


class TestSmoothing:
    def test_passthrough(self):
        np.testing.assert_array_equal(smooth([0.5, 0.5]), [0.5, 0.5])

    def test_clamp(self):
        out = smooth([1.0, 0.0])
        assert out[1] == 1e-9
        assert out[0] == 1 - 1e-9
        assert out.sum() == pytest.approx(1.0, abs=1e-15)

    def test_unnormalized(self):
        np.testing.assert_allclose(smooth([2.0, 6.0]), [0.25, 0.75], atol=1e-16)

    def test_errors(self):
        with pytest.raises(DomainError, match="bin 1"):
            smooth([0.2, -0.1, 0.9])
        with pytest.raises(DomainError):
            smooth([0.0, 0.0])
        with pytest.raises(DomainError):
            smooth([1.0])

    @given(st.lists(st.one_of(st.just(0.0), st.floats(1e-12, 10.0)), min_size=2, max_size=30)
           .filter(lambda v: sum(v) > 0))
    def test_idempotent(self, row):
        once = smooth(row)
        assert np.all(once >= 1e-9)
        assert abs(once.sum() - 1.0) <= 1e-9
        twice = smooth(once)
        assert np.max(np.abs(twice - once)) <= 1e-15


class TestLoading:
    def test_csv(self, tmp_path):
        path = write(tmp_path, "h.csv", "# comment\n0.5,0.5\n\n1,0\n")
        h = load_histograms(path)
        assert len(h) == 2
        np.testing.assert_array_equal(h[0], [0.5, 0.5])
        assert h[1][1] == 1e-9

    def test_json(self, tmp_path):
        path = write(tmp_path, "h.json", json.dumps([[1, 3], [2, 2]]))
        np.testing.assert_allclose(load_histograms(path), [[0.25, 0.75], [0.5, 0.5]])
        path = write(tmp_path, "g.json", json.dumps({"histograms": [[1, 1]]}))
        np.testing.assert_allclose(load_histograms(path), [[0.5, 0.5]])

    def test_parse_error_location(self, tmp_path):
        path = write(tmp_path, "h.csv", "0.5,0.5\n0.5,abc\n")
        with pytest.raises(ParseError, match=r"h\.csv:2:2"):
            load_histograms(path)

    def test_negative_named(self, tmp_path):
        path = write(tmp_path, "h.csv", "0.2,-0.1,0.9\n")
        with pytest.raises(ParseError, match="negative entry -0.1"):
            load_histograms(path)

    def test_ragged_and_short(self, tmp_path):
        with pytest.raises(ParseError, match="columns"):
            load_histograms(write(tmp_path, "a.csv", "0.5,0.5\n0.2,0.3,0.5\n"))
        with pytest.raises(ParseError):
            load_histograms(write(tmp_path, "b.csv", "1\n1\n"))
        with pytest.raises(ParseError):
            load_histograms(write(tmp_path, "c.csv", "0,0\n"))
        with pytest.raises(ParseError):
            load_histograms(write(tmp_path, "d.csv", "# nothing\n"))
        with pytest.raises(ParseError):
            load_histograms(str(tmp_path / "missing.csv"))
        with pytest.raises(ParseError):
            load_histograms(write(tmp_path, "e.json", "[[1, 2"))

    def test_matrix_keeps_raw_values(self, tmp_path):
        np.testing.assert_array_equal(load_matrix(write(tmp_path, "m.csv", "1,2\n3,0\n")), [[1, 2], [3, 0]])

    def test_labeled(self, tmp_path):
        X, y = load_labeled(write(tmp_path, "l.csv", "1,0.5,0.5\n2,1,3\n"))
        np.testing.assert_array_equal(y, [1, 2])
        np.testing.assert_allclose(X[1], [0.25, 0.75])
        with pytest.raises(ParseError, match="not an integer"):
            load_labeled(write(tmp_path, "m.csv", "1.5,0.5,0.5\n"))

    def test_round_trip(self, tmp_path, rng):
        hists = [smooth(r) for r in rng.dirichlet(np.full(12, 0.3), size=20)]
        path = tmp_path / "rt.csv"
        save_histograms(path, hists)
        back = load_histograms(path)
        for a, b in zip(hists, back):
            np.testing.assert_array_equal(a, b)
        save_histograms(tmp_path / "rt2.csv", back)
        assert (tmp_path / "rt2.csv").read_text() == path.read_text()

    def test_json_output(self):
        text = to_json({"a": np.float64(0.1), "b": np.array([1.0, np.inf]), "c": np.int64(3)})
        assert json.loads(text) == {"a": 0.1, "b": [1.0, "inf"], "c": 3}


class TestIntensity:
    def test_black(self):
        h = intensity_histogram([(0, 0, 0)] * 4, smoothed=False)
        assert h[0] == 1.0 and h.sum() == 1.0

    def test_white_clamped(self):
        assert 0.3 * 255 + 0.596 * 255 + 0.11 * 255 == pytest.approx(256.53)
        h = intensity_histogram([(255, 255, 255)], smoothed=False)
        assert h[255] == 1.0

    def test_red(self):
        h = intensity_histogram([(0, 0, 0), (255, 0, 0)], smoothed=False)
        b = int(np.floor(76.5 / (255 / 256)))
        assert b == 76
        assert h[0] == 0.5 and h[b] == 0.5

    def test_bins(self):
        h = intensity_histogram([(0, 0, 0), (255, 0, 0)], IngestionConfig(bins=4), smoothed=False)
        np.testing.assert_array_equal(h, [0.5, 0.5, 0, 0])

    def test_smoothed(self):
        h = intensity_histogram([(10, 20, 30)])
        assert h.size == 256 and np.all(h >= 1e-9)
        assert h.sum() == pytest.approx(1.0, abs=1e-12)

    def test_errors(self):
        with pytest.raises(DomainError):
            intensity_histogram([(256, 0, 0)])
        with pytest.raises(DomainError):
            intensity_histogram([(-1, 0, 0)])
        with pytest.raises(DomainError):
            intensity_histogram([])


class TestCliDiv:
    def test_identical_rows(self, tmp_path, capsys):
        path = write(tmp_path, "p.csv", "0.5,0.5\n0.5,0.5\n")
        code, out, _ = run(["div", "--measure", "js", "--input", path], capsys)
        assert code == 0
        assert json.loads(out) == [{"row_pair": [1, 2], "measure": "js", "alpha": None, "value": 0.0}]

    @pytest.mark.parametrize("measure,alpha,want", [
        ("kl", None, lambda p, q: dv.kl(p, q)),
        ("ekl", None, lambda p, q: dv.ekl(p, q)),
        ("jeffreys", None, lambda p, q: dv.jeffreys(p, q)),
        ("js", None, lambda p, q: dv.js(p, q)),
        ("k", None, lambda p, q: dv.k_div(p, q)),
        ("k-alpha", 0.3, lambda p, q: dv.k_alpha(p, q, 0.3)),
        ("js-alpha", 0.3, lambda p, q: dv.js_alpha(p, q, 0.3)),
        ("sj", 0.3, lambda p, q: dv.sym_skew_jensen("shannon", p, q, 0.3)),
        ("skl", 0.3, lambda p, q: dv.skl_alpha(p, q, 0.3)),
        ("l-alpha", 0.3, lambda p, q: dv.l_alpha(p, q, 0.3)),
        ("s-param", 0.3, lambda p, q: dv.s_param("shannon", p, q, 0.3)),
        ("phi", None, lambda p, q: dv.jeffreys(p, q)),
    ])
    def test_measures(self, tmp_path, capsys, measure, alpha, want):
        path = write(tmp_path, "p.csv", "0.9,0.1\n0.1,0.9\n0.5,0.5\n0.25,0.75\n")
        argv = ["div", "--measure", measure, "--input", path]
        if alpha is not None:
            argv += ["--alpha", str(alpha)]
        code, out, _ = run(argv, capsys)
        assert code == 0
        res = json.loads(out)
        assert [r["row_pair"] for r in res] == [[1, 2], [3, 4]]
        assert res[0]["alpha"] == alpha
        assert res[0]["value"] == pytest.approx(float(want([0.9, 0.1], [0.1, 0.9])), abs=1e-15)
        assert res[1]["value"] == pytest.approx(float(want([0.5, 0.5], [0.25, 0.75])), abs=1e-15)

    def test_phi_choice(self, tmp_path, capsys):
        path = write(tmp_path, "p.csv", "0.5,0.5\n0.25,0.75\n")
        code, out, _ = run(["div", "--measure", "phi", "--phi", "neg-log", "--input", path], capsys)
        assert json.loads(out)[0]["value"] == pytest.approx(0.13081203594113696, abs=1e-15)

    def test_output_file(self, tmp_path, capsys):
        path = write(tmp_path, "p.csv", "0.5,0.5\n0.25,0.75\n")
        out = tmp_path / "o.json"
        assert run(["div", "--measure", "kl", "--input", path, "--output", str(out)], capsys)[0] == 0
        assert json.loads(out.read_text())[0]["value"] == pytest.approx(0.14384103622589046, abs=1e-15)

    def test_errors(self, tmp_path, capsys):
        odd = write(tmp_path, "odd.csv", "0.5,0.5\n")
        assert run(["div", "--measure", "js", "--input", odd], capsys)[0] == 1
        pair = write(tmp_path, "p.csv", "0.5,0.5\n0.25,0.75\n")
        code, _, err = run(["div", "--measure", "skl", "--input", pair], capsys)
        assert code == 1 and "--alpha" in err
        code, _, err = run(["div", "--measure", "skl", "--alpha", "2", "--input", pair], capsys)
        assert code == 1
        neg = write(tmp_path, "n.csv", "0.2,-0.1,0.9\n0.2,0.1,0.7\n")
        code, _, err = run(["div", "--measure", "js", "--input", neg], capsys)
        assert code == 1 and "negative" in err


class TestCliOther:
    def test_unknown_flag_and_command(self, capsys):
        code, _, err = run(["div", "--bogus"], capsys)
        assert code == 1 and "usage" in err
        code, _, err = run(["frobnicate"], capsys)
        assert code == 1 and "usage" in err
        assert run([], capsys)[0] == 1

    def test_help_lists_flags(self, capsys):
        code, out, _ = run(["centroid", "--help"], capsys)
        assert code == 0
        for flag in ("--alpha", "--generator", "--init", "--tol", "--max-iter", "--weights", "--strict"):
            assert flag in out

    def test_profile(self, capsys):
        code, out, _ = run(["profile", "--alphas", "0.1,0.5", "--points", "3"], capsys)
        lines = out.splitlines()
        assert code == 0 and lines[0] == "alpha,t,sj"
        assert len(lines) == 7
        a, t, v = map(float, lines[1].split(","))
        assert (a, t) == (0.1, 0.0)
        assert v == pytest.approx(float(dv.scalar_sj("shannon", 0.9, 0.1, 0.1)), abs=1e-15)

    def test_profile_bad_alpha(self, capsys):
        assert run(["profile", "--alphas", "0.7"], capsys)[0] == 1

    def test_centroid(self, tmp_path, capsys):
        path = write(tmp_path, "pts.csv", "1\n4\n")
        code, out, _ = run(["centroid", "--input", path], capsys)
        res = json.loads(out)
        assert code == 0
        assert set(res) == {"center", "iterations", "converged", "residual", "energy_trace"}
        assert res["center"][0] == pytest.approx(SHANNON_14, rel=1e-9)
        code, out, _ = run(["centroid", "--input", path, "--generator", "burg", "--init", "quasi"], capsys)
        assert json.loads(out)["center"][0] == pytest.approx(2.0, rel=1e-9)

    def test_centroid_weights(self, tmp_path, capsys):
        pts = write(tmp_path, "pts.csv", "1\n4\n")
        w = write(tmp_path, "w.csv", "3\n1\n")
        code, out, _ = run(["centroid", "--generator", "quadratic", "--input", pts, "--weights", w], capsys)
        assert json.loads(out)["center"][0] == pytest.approx(1.75, abs=1e-12)

    def test_centroid_strict(self, tmp_path, capsys):
        path = write(tmp_path, "pts.csv", "1\n4\n")
        code, out, err = run(["centroid", "--input", path, "--max-iter", "2", "--strict"], capsys)
        assert code == 2 and json.loads(out)["converged"] is False
        assert run(["centroid", "--input", path, "--max-iter", "2"], capsys)[0] == 0

    def test_natparam(self, tmp_path, capsys):
        path = write(tmp_path, "s.json", "[0.2, 0.3, 0.5]")
        code, out, _ = run(["natparam", "--family", "multinomial", "--to", "natural", "--input", path], capsys)
        theta = json.loads(out)
        np.testing.assert_allclose(theta, [np.log(0.4), np.log(0.6)], atol=1e-15)
        back = write(tmp_path, "t.json", json.dumps(theta))
        code, out, _ = run(["natparam", "--family", "multinomial", "--to", "source", "--input", back], capsys)
        np.testing.assert_allclose(json.loads(out), [0.2, 0.3, 0.5], atol=1e-15)
        path = write(tmp_path, "g.json", "[[0, 1], [1, 4]]")
        code, out, _ = run(["natparam", "--family", "gaussian", "--to", "natural", "--input", path], capsys)
        np.testing.assert_allclose(json.loads(out), [[0, -0.5], [0.25, -0.125]])

    def test_bhatt(self, tmp_path, capsys):
        path = write(tmp_path, "b.json", "[[[0, 1], [1, 1]]]")
        code, out, _ = run(["bhatt", "--family", "gaussian", "--input", path], capsys)
        res = json.loads(out)[0]
        assert code == 0 and res["pair"] == 1
        assert res["bhattacharyya"] == pytest.approx(0.125, abs=1e-14)
        assert res["sym_bhattacharyya"] == pytest.approx(0.125, abs=1e-14)
        path = write(tmp_path, "p.json", "[[1, 4]]")
        code, out, _ = run(["bhatt", "--family", "poisson", "--input", path], capsys)
        assert json.loads(out)[0]["bhattacharyya"] == pytest.approx(0.5, abs=1e-14)
        bad = write(tmp_path, "x.json", "[[[0, -1], [1, 1]]]")
        assert run(["bhatt", "--family", "gaussian", "--input", bad], capsys)[0] == 1

    def test_kmeans(self, tmp_path, capsys):
        rows = "\n".join(["0.8,0.1,0.1", "0.7,0.2,0.1", "0.1,0.1,0.8", "0.1,0.2,0.7"])
        path = write(tmp_path, "d.csv", rows + "\n")
        code, out, _ = run(["kmeans", "--k", "2", "--alpha", "0.25", "--input", path], capsys)
        res = json.loads(out)
        assert code == 0
        a = res["assignments"]
        assert a[0] == a[1] and a[2] == a[3] and a[0] != a[2]

    def test_sweep(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        lines = []
        for label, proto in ((1, [0.6, 0.3, 0.1]), (2, [0.1, 0.3, 0.6])):
            for h in rng.dirichlet(20 * np.asarray(proto), size=20):
                lines.append(",".join([str(label)] + [repr(float(v)) for v in h]))
        path = write(tmp_path, "l.csv", "\n".join(lines) + "\n")
        code, out, _ = run(["sweep", "--alphas", "0.1,0.5", "--input", path], capsys)
        rows = out.splitlines()
        assert code == 0
        assert rows[0] == "alpha,accuracy,acc_class_1,acc_class_2,mean_cccp_iters"
        assert len(rows) == 3
        assert float(rows[1].split(",")[1]) > 0.9

    def test_determinism_and_seed_env(self, tmp_path, capsys, monkeypatch):
        rng = np.random.default_rng(1)
        path = write(tmp_path, "d.csv", "\n".join(",".join(repr(float(v)) for v in r)
                                                  for r in rng.dirichlet(np.ones(4), size=30)) + "\n")
        argv = ["kmeans", "--k", "4", "--input", path]
        first = run(argv, capsys)[1]
        assert run(argv, capsys)[1] == first
        assert run(argv + ["--seed", "0"], capsys)[1] == first
        monkeypatch.setenv("SKEWJENSEN_SEED", "17")
        assert run(argv, capsys)[1] == run(argv + ["--seed", "17"], capsys)[1]
        monkeypatch.setenv("SKEWJENSEN_SEED", "x")
        assert run(argv, capsys)[0] == 1

    def test_module_entry(self, tmp_path):
        path = write(tmp_path, "p.csv", "0.5,0.5\n0.5,0.5\n")
        proc = subprocess.run([sys.executable, "-m", "skewjensen", "div", "--measure", "js", "--input", path],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)[0]["value"] == 0.0
