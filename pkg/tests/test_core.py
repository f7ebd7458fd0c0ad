import numpy as np
import pytest

from realitygame.core import (
    GeneralBetMatrix,
    Outcome,
    PlayerPopulation,
    apply_outcome,
    payoff_general,
    total_bet,
)
from realitygame.errors import ZeroPool


def test_uniform_grid_spacing_and_equal_wealth():
    pop = PlayerPopulation.uniform_grid(29)
    assert pop.size == 29
    assert np.allclose(pop.strategies, np.arange(1, 30) / 30)
    assert np.allclose(pop.wealths, 1 / 29)
    assert total_bet(pop) == pytest.approx(0.5)


def test_population_is_read_only_and_validated():
    pop = PlayerPopulation.uniform_grid(3)
    with pytest.raises(ValueError):
        pop.wealths[0] = 1.0
    with pytest.raises(ValueError):
        PlayerPopulation(np.array([0.2, 0.4]), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        PlayerPopulation(np.array([1.2]), np.array([1.0]))
    with pytest.raises(ValueError):
        PlayerPopulation(np.array([0.2, 0.4]), np.array([1.0]))


def test_heads_and_tails_update():
    pop = PlayerPopulation.from_strategies([0.2, 0.6], [0.5, 0.5])
    p = 0.4
    heads = apply_outcome(pop, Outcome.HEADS)
    assert np.allclose(heads.wealths, [0.2 * 0.5 / p, 0.6 * 0.5 / p])
    tails = apply_outcome(pop, Outcome.TAILS)
    assert np.allclose(tails.wealths, [0.8 * 0.5 / (1 - p), 0.4 * 0.5 / (1 - p)])
    assert pop.wealths.tolist() == [0.5, 0.5]


def test_single_player_keeps_everything():
    pop = PlayerPopulation.from_strategies([0.3])
    assert apply_outcome(pop, Outcome.HEADS).wealths.tolist() == [1.0]


def test_zero_pool():
    pop = PlayerPopulation.from_strategies([0.0, 0.0])
    with pytest.raises(ZeroPool):
        apply_outcome(pop, Outcome.HEADS)
    assert np.allclose(apply_outcome(pop, Outcome.TAILS).wealths, [0.5, 0.5])


def test_underflow_is_clamped_and_renormalized():
    pop = PlayerPopulation(np.array([1e-310, 0.5]), np.array([0.5, 0.5]))
    w = apply_outcome(pop, Outcome.HEADS).wealths
    assert w[0] == 0.0 and w[1] == 1.0


def test_general_matrix_reduces_to_binary_game():
    pop = PlayerPopulation.from_strategies([0.1, 0.5, 0.9], [0.2, 0.3, 0.5])
    mat = GeneralBetMatrix.from_population(pop)
    assert np.allclose(payoff_general(mat, 0), apply_outcome(pop, Outcome.HEADS).wealths)
    assert np.allclose(payoff_general(mat, 1), apply_outcome(pop, Outcome.TAILS).wealths)


def test_general_matrix_three_outcomes():
    mat = GeneralBetMatrix(np.array([[1.0, 0.0, 0.0], [0.5, 0.5, 0.0]]), np.array([0.5, 0.5]))
    assert np.allclose(payoff_general(mat, 0), [2 / 3, 1 / 3])
    assert np.allclose(payoff_general(mat, 1), [0.0, 1.0])
    with pytest.raises(ZeroPool):
        payoff_general(mat, 2)
    with pytest.raises(ValueError):
        GeneralBetMatrix(np.array([[0.5, 0.4]]), np.array([1.0]))


def test_outcome_index():
    assert Outcome.HEADS.index == 0 and Outcome.TAILS.index == 1
    assert Outcome.from_bool(True) is Outcome.HEADS
