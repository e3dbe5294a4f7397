import pytest

from formalcoh.complexes import DegreeBox, koszul, shift
from formalcoh.errors import InvalidInput
from formalcoh.invariants import (cd, cd_of_support, depth, dim_complex, fdepth,
                                  is_cohen_macaulay, stage_policy, sup_formal,
                                  sup_local_homology)
from formalcoh.monomial import NEG_INF, POS_INF, ModulePresentation, MonomialIdeal, RingSpec
from formalcoh.verify import CheckConfig, Instance, run_check

R1, R2 = RingSpec(1), RingSpec(2)
X, Y = (1, 0), (0, 1)
BOX2 = DegreeBox.cube(2, -2, 2)
BOX1 = DegreeBox.cube(1, -3, 3)
S1, S2 = ModulePresentation.free(R1), ModulePresentation.free(R2)
m1, m2 = MonomialIdeal.maximal(1), MonomialIdeal.maximal(2)
x1, x2 = MonomialIdeal(1, [(1,)]), MonomialIdeal(2, [X])


def quo(ring, *gens):
    return ModulePresentation.quotient(ring, MonomialIdeal(ring.n, gens))


def k_plus_S(ring):
    return ModulePresentation.direct_sum(quo(ring, *MonomialIdeal.maximal(ring.n).generators),
                                         ModulePresentation.free(ring))


def test_depth():
    assert depth(m2, S2).value == 2
    assert depth(x2, S2).value == 1
    assert depth(m1, k_plus_S(R1)).value == 0


def test_depth_rejects_zero_ideal():
    with pytest.raises(InvalidInput):
        depth(MonomialIdeal(2), S2)


def test_dim():
    assert dim_complex(S2).value == 2
    assert dim_complex(koszul([X, Y], R2)).value == 0
    assert dim_complex(quo(R2, X)).value == 1
    assert dim_complex(quo(R2, (0, 0))).value == NEG_INF


def test_dim_of_shift():
    # sup(dim H_i - i): moving homology up one homological step lowers dim by one
    M = quo(R2, X)
    assert dim_complex(shift(koszul([X], R2), 1)).value == dim_complex(M).value - 1
    assert dim_complex(shift(koszul([X], R2), -1)).value == dim_complex(M).value + 1


def test_cd():
    assert cd(x2, S2).value == 1
    assert cd(MonomialIdeal(2, [(1, 1)]), S2).value == 1
    for M in (S2, quo(R2, X), quo(R2, (2, 0), (1, 1)), quo(R2, X, Y), k_plus_S(R2)):
        assert cd(m2, M).value == dim_complex(M).value


def test_cd_of_support():
    assert cd_of_support(x2, S2).value == 1
    assert cd_of_support(x2, quo(R2, X)).value == 0


def test_fdepth_examples():
    assert fdepth(x2, m2, S2, BOX2).value == 1
    assert fdepth(x2, m2, quo(R2, X), BOX2).value == 1


def test_fdepth_equals_minus_sup_local_homology():
    for M in (S2, quo(R2, X), quo(R2, (2, 0), (1, 1))):
        assert fdepth(x2, x2, M, BOX2).value == -sup_local_homology(x2, M, BOX2).value


def test_sup_formal():
    r = sup_formal(x2, m2, S2, BOX2)
    assert r.value == 1 == r.detail["dim X/aX"]
    r = sup_formal(x2, m2, quo(R2, Y), BOX2)
    assert r.value == 0 == r.detail["dim X/aX"]
    zero = ModulePresentation.quotient(R2, MonomialIdeal(2, [(0, 0)]))
    assert sup_formal(x2, m2, zero, BOX2).value == NEG_INF


def test_cohen_macaulay():
    assert is_cohen_macaulay(S2)[0]
    assert not is_cohen_macaulay(k_plus_S(R1))[0]
    assert is_cohen_macaulay(koszul([X, Y], R2))[0]


def test_stage_policy_grows_with_box():
    assert stage_policy(DegreeBox.cube(2, -5, 5)) > stage_policy(DegreeBox.cube(2, -2, 2))


def test_checks_on_spec_instances():
    cfg1, cfg2 = CheckConfig(BOX1), CheckConfig(BOX2)
    o = run_check("thm_3_6", Instance(x1, k_plus_S(R1), None, "k+S"), cfg1)
    assert o.status == "pass"
    assert (o.evidence["lower"], o.evidence["fdepth"], o.evidence["upper"]) == (-1, 0, 0)
    o = run_check("remark_3_8_i", Instance(x2, S2, None, "S"), cfg2)
    assert o.status == "pass"
    K = koszul([X, Y], R2)
    o = run_check("cor_3_7", Instance(x2, K, None, "K"), cfg2)
    assert o.status == "pass" and o.evidence["i (CM)"] and o.evidence["iii"]
