import numpy as np
import pytest

from fwsfm.functions import (cut_oracle, iwata_oracle, modular_oracle, random_cut_instance,
                             table_oracle)
from fwsfm.oracle import SubmodularOracle, verify_membership
from fwsfm.sfm import minimize
from fwsfm.verify import brute_min, check_submodular, known_minnorm_cases, mask_to_set


def test_mask_to_set():
    assert mask_to_set(0) == ()
    assert mask_to_set(0b1011) == (0, 1, 3)


def test_brute_min_examples(pair_oracle):
    bf = brute_min(pair_oracle)
    assert bf.min_value == 0
    assert bf.minimizers == [(), (0, 1)]
    assert bf.evaluations == 4
    assert brute_min(modular_oracle([3, -1, 2])).minimizers == [(1,)]
    o = iwata_oracle(5)
    assert brute_min(o).min_value == minimize(iwata_oracle(5)).min_value


def test_brute_min_refuses_large_n():
    with pytest.raises(ValueError):
        brute_min(modular_oracle(np.ones(23)))


def test_negative_square_is_submodular():
    # marginals -(2|S| + 1) shrink as S grows: concave in |S|, hence submodular
    assert check_submodular(SubmodularOracle(3, lambda S: -len(S) ** 2))


def test_square_counterexample():
    o = SubmodularOracle(3, lambda S: len(S) ** 2)
    res = check_submodular(o)
    assert not res
    v = res.violation
    # the report carries all four values and they really violate the inequality
    assert v.f_Si - v.f_S < v.f_Ti - v.f_T
    assert set(v.S) <= set(v.T) and v.i not in v.T
    assert v.f_S == o.eval(v.S) and v.f_Ti == o.eval(set(v.T) | {v.i})
    assert str(v)


def test_submodular_positive_cases():
    assert check_submodular(cut_oracle(random_cut_instance(10, 0.8, 9, 3)))
    assert check_submodular(modular_oracle([1, -2, 5, 0]))


def test_check_submodular_refuses_large_n():
    with pytest.raises(ValueError):
        check_submodular(modular_oracle(np.ones(11)))


@pytest.mark.parametrize("name, oracle, x_star", known_minnorm_cases(),
                         ids=[c[0] for c in known_minnorm_cases()])
def test_known_cases_are_consistent(name, oracle, x_star):
    assert check_submodular(oracle)
    assert verify_membership(oracle, x_star, tol=1e-12)
    res = minimize(oracle, epsilon=1e-6)
    np.testing.assert_allclose(res.x_final, x_star, atol=1e-6)


def test_supermodular_table_flagged():
    assert not check_submodular(table_oracle([0, 0, 0, 1], 2))
