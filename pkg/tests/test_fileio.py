import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nodal_atlas.coeffs import HeckeData
from nodal_atlas.errors import FormatError
from nodal_atlas.fileio import (RunSummary, dump_coefficients, fmt, input_digest, load_form, parse_coefficients,
                                read_coefficients, write_coefficients, write_csv, write_pgm)
from nodal_atlas.parallel import pmap, worker_count

from conftest import EVEN_PATH

HEAD = "maassform v1\nt = 13.779751351883144\nparity = even\nnorm = raw\ndata\n"


class TestParse:
    def test_fixture(self, even):
        d = read_coefficients(EVEN_PATH)
        assert d.max_n == 1000 and d.parity == "even"
        assert d.rho1_scaled == even.rho1

    def test_gaps_filled_from_primes(self):
        l2, l3, l5, l7 = 1.5493044779492615, 0.2, -0.7, 0.33
        text = HEAD + f"1 1\n2 {l2}\n3 {l3}\n5 {l5}\n7 {l7}\n10 {l2 * l5}\n"
        d = parse_coefficients(text)
        assert d.max_n == 10
        assert d.lam[4] == pytest.approx(l2 ** 2 - 1, rel=1e-15)
        assert d.lam[6] == pytest.approx(l2 * l3, rel=1e-15)
        assert d.lam[8] == pytest.approx(l2 ** 3 - 2 * l2, rel=1e-15)
        assert d.lam[9] == pytest.approx(l3 ** 2 - 1, rel=1e-15)

    def test_gap_needs_prime(self):
        with pytest.raises(FormatError, match=r"lambda\(3\)"):
            parse_coefficients(HEAD + "1 1\n2 0.5\n4 -0.75\n")

    def test_missing_lambda_one(self):
        with pytest.raises(FormatError, match="n = 1"):
            parse_coefficients(HEAD + "2 0.5\n3 0.1\n")

    def test_lambda_one_value(self):
        with pytest.raises(FormatError, match="lambda"):
            parse_coefficients(HEAD + "1 2\n")

    def test_line_numbers(self):
        with pytest.raises(FormatError, match="line 8"):
            parse_coefficients(HEAD + "1 1\n2 0.5\n3 zz\n")
        with pytest.raises(FormatError, match="line 8"):
            parse_coefficients(HEAD + "1 1\n3 0.5\n2 0.1\n")

    @pytest.mark.parametrize("text,msg", [
        ("maassform v2\n", "format tag"),
        ("maassform v1\nt = 1\nparity = even\nnorm = l2\ndata\n1 1\n", "rho1_scaled"),
        ("maassform v1\nt = 1\nparity = up\nnorm = raw\ndata\n1 1\n", "parity"),
        ("maassform v1\nt = 1\nparity = even\ndata\n1 1\n", "norm"),
        ("maassform v1\nt = 1\nparity = even\nnorm = raw\n", "data"),
        ("maassform v1\nt = 1\nparity = even\nnorm = raw\ndata\n", "no coefficients"),
    ])
    def test_malformed(self, text, msg):
        with pytest.raises(FormatError, match=msg):
            parse_coefficients(text)

    def test_comments(self):
        d = parse_coefficients("# hello\n" + HEAD + "# body\n1 1\n\n2 0.5\n")
        assert d.max_n == 2


class TestRoundTrip:
    def test_fixture(self, tmp_path, even):
        p = tmp_path / "f.mf"
        write_coefficients(p, even)
        again = read_coefficients(p)
        assert np.array_equal(again.lam[1:], even.coeffs.lam[1:])
        assert again.t == even.t and again.rho1_scaled == even.rho1
        assert p.read_text() == EVEN_PATH.read_text()

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=30), st.floats(0.1, 1e3))
    def test_bit_identical(self, vals, t):
        d = HeckeData(t, "odd", np.array([np.nan, 1.0] + vals), 0.123456789012345678)
        again = parse_coefficients(dump_coefficients(d))
        assert np.array_equal(again.lam[1:], d.lam[1:])
        assert again.t == d.t and again.rho1_scaled == d.rho1_scaled

    def test_raw_normalised_on_load(self, tmp_path, even):
        p = tmp_path / "raw.mf"
        write_coefficients(p, even.coeffs.with_rho1(None), norm="raw")
        f = load_form(p)
        assert f.rho1 == pytest.approx(even.rho1, rel=1e-8)
        assert load_form(p, normalize=False).coeffs.rho1_scaled is None

    def test_l2_needs_rho(self, even):
        with pytest.raises(FormatError):
            dump_coefficients(even.coeffs.with_rho1(None), norm="l2")


class TestOutputs:
    def test_fmt(self):
        x = 0.1 + 0.2
        assert float(fmt(x)) == x and len(fmt(x).replace(".", "").lstrip("0")) == 17

    def test_csv(self, tmp_path):
        p = tmp_path / "a.csv"
        write_csv(p, ["a", "b"], [(1, 0.5), (2, 1 / 3)])
        assert p.read_text() == "a,b\n1,0.5\n2,0.33333333333333331\n"

    def test_pgm(self, tmp_path):
        p = tmp_path / "a.pgm"
        lab = np.array([[0, 1, 2], [255, 256, 3]])
        write_pgm(p, lab)
        raw = p.read_bytes()
        assert raw.startswith(b"P5\n3 2\n255\n")
        # top row of the image is the last grid row; labels wrap modulo 255 into 1..255
        assert list(raw[-6:]) == [255, 1, 3, 0, 1, 2]

    def test_summary(self):
        s = RunSummary("x", {"form": "f"}, {"a": 0.5}, {"ok": True, "v": 1 / 3}, [("c", True, "")], wall_time=3.0)
        text = s.text()
        assert "wall" not in text
        assert "result.v=0.33333333333333331" in text and "check.c=pass" in text
        assert s.ok
        s.checks.append(("d", False, "bad"))
        assert not s.ok and "check.d=FAIL bad" in s.text()

    def test_digest(self):
        assert input_digest(EVEN_PATH).startswith("even_13p78.mf:")


class TestParallel:
    def test_env(self, monkeypatch):
        monkeypatch.setenv("NODAL_ATLAS_THREADS", "8")
        assert worker_count() == 8
        monkeypatch.setenv("NODAL_ATLAS_THREADS", "zero")
        assert worker_count() == 1
        monkeypatch.delenv("NODAL_ATLAS_THREADS")
        assert worker_count(3) == 3

    def test_order(self):
        items = list(range(50))
        assert pmap(lambda v: v * v, items, workers=8) == [v * v for v in items]
