import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paretobandit.environments import (
    GainFileError,
    GainMatrix,
    Noise,
    StochasticInstance,
    eps_schedule,
    gaps,
    load_gains,
    pull,
    save_gains,
    thm1_family,
)


def test_instance_validation():
    with pytest.raises(ValueError):
        StochasticInstance((0.0, 1.5))
    with pytest.raises(ValueError):
        StochasticInstance((0.5, 1.2), Noise.BERNOULLI)
    StochasticInstance((0.0, 1.0), Noise.BERNOULLI)


def test_pull_degenerate_bernoulli():
    rng = np.random.default_rng(0)
    inst = StochasticInstance((1.0, 0.0), Noise.BERNOULLI)
    assert all(pull(inst, 0, rng) == 1.0 for _ in range(100))
    assert all(pull(inst, 1, rng) == 0.0 for _ in range(100))
    with pytest.raises(IndexError):
        pull(inst, 2, rng)


def test_pull_gaussian_mean():
    rng = np.random.default_rng(12345)
    inst = StochasticInstance((0.5,))
    xs = np.array([pull(inst, 0, rng) for _ in range(10**6)])
    assert abs(xs.mean() - 0.5) <= 0.004


def test_pull_consumes_one_draw():
    inst = StochasticInstance((0.2, -0.1))
    a = np.random.Generator(np.random.PCG64(7))
    b = np.random.Generator(np.random.PCG64(7))
    arms = [0, 1, 1, 0, 1]
    got = [pull(inst, k, a) for k in arms]
    ref = np.array(inst.means)[arms] + b.standard_normal(len(arms))
    assert got == pytest.approx(ref, abs=0)


def test_gaps_examples():
    g = gaps(StochasticInstance((0.0, -0.3)))
    assert g.optimal_arm == 0
    assert g.delta == pytest.approx([0.0, 0.3])
    g = gaps(StochasticInstance((0.5, 0.5)))
    assert g.optimal_arm == 0
    assert list(g.delta) == [0.0, 0.0]
    g = gaps(StochasticInstance((0.3, 0.5, 0.4)))
    assert g.delta_pair[0, 2] == pytest.approx(0.1)
    assert g.delta_pair[2, 0] == pytest.approx(-0.1)


means_st = st.lists(st.floats(-0.5, 0.5), min_size=1, max_size=8)


@given(means_st)
def test_gap_table_invariants(mu):
    g = gaps(StochasticInstance(tuple(mu)))
    assert g.delta[g.optimal_arm] == 0
    assert np.all(g.delta >= 0)
    assert np.array_equal(g.delta_pair, -g.delta_pair.T)


@given(means_st, st.randoms(use_true_random=False))
def test_gaps_relabel_equivariant(mu, rnd):
    perm = list(range(len(mu)))
    rnd.shuffle(perm)
    g = gaps(StochasticInstance(tuple(mu)))
    gp = gaps(StochasticInstance(tuple(mu[p] for p in perm)))
    assert np.array_equal(gp.delta, g.delta[perm])
    assert np.array_equal(gp.delta_pair, g.delta_pair[np.ix_(perm, perm)])
    # tie-break re-evaluated on the relabelled instance
    assert gp.optimal_arm == min(a for a in range(len(mu)) if mu[perm[a]] == max(mu))


def test_thm1_family_examples():
    fam = thm1_family([0.1, 0.2])
    assert fam[0].means == pytest.approx((0.5, 0.3))
    assert fam[1].means == pytest.approx((0.5, 0.7))
    fam = thm1_family([0.1, 0.1, 0.1])
    assert fam[0].means == pytest.approx((0.5, 0.4, 0.4))


def test_thm1_family_preconditions():
    with pytest.raises(ValueError):
        thm1_family([0.2, 0.1])
    with pytest.raises(ValueError):
        thm1_family([0.0, 0.1])
    with pytest.raises(ValueError):
        thm1_family([0.1, 0.6])


eps_st = st.lists(st.floats(1e-3, 0.5), min_size=2, max_size=8).map(
    lambda e: [min(e)] + e[1:])


@given(eps_st)
def test_thm1_family_properties(eps):
    for k, inst in enumerate(thm1_family(eps)):
        g = gaps(inst)
        assert g.optimal_arm == k
        assert max(inst.means) - min(inst.means) <= 1.0
        others = [j for j in range(len(eps)) if j != k]
        assert all(g.delta_pair[j, k] >= eps[k] - 1e-12 for j in others)


def test_eps_schedule():
    assert list(eps_schedule([5000, 5000], 5000)) == [0.5, 0.5]
    assert eps_schedule([10, 100], 5000) == pytest.approx([0.008, 0.08])
    assert eps_schedule([0.0, 10], 5000)[0] == 1e-3
    assert eps_schedule([0.0], 5000, floor=0.01)[0] == 0.01
    with pytest.raises(ValueError):
        eps_schedule([1.0], 100, c=2.0)


def test_gain_file_roundtrip(tmp_path):
    f = tmp_path / "g.csv"
    f.write_text("1,0\n0,1\n")
    g = load_gains(f)
    assert g.gains.tolist() == [[1.0, 0.0], [0.0, 1.0]]
    out = tmp_path / "h.csv"
    save_gains(g, out)
    assert out.read_text() == "1.0,0.0\n0.0,1.0\n"
    save_gains(load_gains(out), tmp_path / "i.csv")
    assert (tmp_path / "i.csv").read_bytes() == out.read_bytes()


def test_gain_file_random_roundtrip(tmp_path):
    g = GainMatrix(np.random.default_rng(3).random((50, 4)))
    save_gains(g, tmp_path / "a.csv")
    assert np.array_equal(load_gains(tmp_path / "a.csv").gains, g.gains)


def test_gain_file_errors(tmp_path):
    f = tmp_path / "g.csv"
    f.write_text("1,0\n0,1.5\n")
    with pytest.raises(GainFileError) as exc:
        load_gains(f)
    assert (exc.value.row, exc.value.col) == (2, 2)
    f.write_text("1,0\n0,abc\n")
    with pytest.raises(GainFileError) as exc:
        load_gains(f)
    assert (exc.value.row, exc.value.col) == (2, 2)
    f.write_text("1,0\n0\n")
    with pytest.raises(GainFileError):
        load_gains(f)
    with pytest.raises(GainFileError):
        GainMatrix(np.array([[0.2, -0.1]]))
