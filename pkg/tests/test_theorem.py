import math
from fractions import Fraction

import pytest

from perturb_lab.theorem import BoundFormulaInput, DomainError, h_tilde, predicted_row, theorem_bound


def test_unit_degree_gives_m_one():
    tb = theorem_bound(BoundFormulaInput(n=115200, p=Fraction(1, 115200), delta=1, C=6))
    assert tb.n2p == 115200 and tb.L == 115200 and tb.m == 1
    assert tb.M == Fraction(72, 25)
    assert tb.branch == "random" and tb.h is None
    assert tb.cor_h_branch == 1 and tb.cor_h == pytest.approx(math.sqrt(115200))


def test_balanced_m_gives_q():
    tb = theorem_bound(BoundFormulaInput(n=331776, p=Fraction(1, 331776), delta=1, C=6))
    assert tb.M == 1 and tb.m == Fraction(72, 25)
    assert tb.q == pytest.approx(1 - math.exp(-1), abs=1e-15)


def test_clique_branch():
    tb = theorem_bound(BoundFormulaInput(n=10**7, p=Fraction(192, 10**4), delta=8 * 10**6, C=1))
    assert tb.n2p == 192 * 10**10
    assert tb.branch == "clique" and tb.m == Fraction(25, 2)
    assert (tb.tw, tb.td, tb.h, tb.genus) == (11, 12, 12, 6)
    assert tb.cor_h_branch == 3 and tb.cor_h == 240000


def test_middle_corollary_branch():
    tb = theorem_bound(BoundFormulaInput(n=10**6, p=Fraction(1, 10**6), delta=2000))
    assert tb.branch == "random" and tb.cor_h_branch == 2
    assert tb.cor_h == pytest.approx(10**6 / (2000 * math.sqrt(math.log(2000))))
    assert tb.cor_h == pytest.approx(181.358, abs=1e-3)
    assert tb.cor_genus == 250000 and tb.cor_tw == 500 and tb.cor_td == 500


def test_sparse_hadwiger_piece():
    tb = theorem_bound(BoundFormulaInput(n=10**6, p=Fraction(1, 10**6), delta=1))
    assert tb.m == Fraction(625, 72)
    assert tb.q == pytest.approx(1 - math.exp(-0.331776))
    assert tb.q == pytest.approx(0.28235, abs=1e-5)
    assert tb.h == pytest.approx(math.sqrt(625 / 72))
    assert tb.cor_h == pytest.approx(1000)
    assert tb.tw == tb.td == Fraction(625, 72)


def test_domain_errors():
    with pytest.raises(DomainError):
        theorem_bound(BoundFormulaInput(n=10, p=Fraction(1, 100), delta=1))
    with pytest.raises(DomainError):
        theorem_bound(BoundFormulaInput(n=1000, p=0.01, delta=0))


def test_h_tilde_pieces():
    assert h_tilde(1, 0.5) is None
    assert h_tilde(100, 0.01) is None          # q < 2/m
    assert h_tilde(100, 0.03) == pytest.approx(10)
    assert h_tilde(100, 0.9) == pytest.approx(100 / (2 * math.sqrt(math.log2(100))))
    mid = h_tilde(1000, 0.2)
    assert mid == pytest.approx(1000 / (2 * math.sqrt(math.log(200) / -math.log(0.8))))


def test_hypothesis_flags():
    tb = theorem_bound(BoundFormulaInput(n=10**6, p=Fraction(1, 10**6), delta=1, C=6, c=1.2))
    assert tb.hypotheses["C_ge_10c"] is False
    assert tb.hypotheses["p_le_2_over_n"] is True


def test_predicted_row_blank_when_undefined():
    assert predicted_row(10, 0.001, 1) == {"tw_pred": "", "td_pred": "", "genus_pred": "", "h_pred": ""}
    row = predicted_row(10**6, 1e-6, 1)
    assert row["tw_pred"] == pytest.approx(625 / 72)
