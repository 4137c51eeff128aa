import numpy as np
import pytest

from timebinsim.mps import (
    CzSandwich,
    H,
    I2,
    MpsRecipe,
    RecipeError,
    excitation_rotation,
    load_recipe,
    prepare_mps,
    prepare_via_rus,
    preset_recipe,
    save_recipe,
    _excitation_sandwiches,
)
from timebinsim.mubgate import CZ
from timebinsim.qstate import fidelity_up_to_phase

from helpers import (
    KET0,
    KET1,
    PLUS,
    cluster_amplitudes,
    ghz_amplitudes,
    haar_unitary,
    schmidt_rank,
    w_amplitudes,
)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def test_identity_recipe():
    recipe = MpsRecipe(3, (KET0,) * 3, (np.eye(4),) * 2)
    out = prepare_mps(recipe)
    assert out.amplitudes[0] == 1.0


def test_cz_on_plus_plus():
    # oracle: direct 4x4 multiplication
    recipe = MpsRecipe(2, (PLUS, PLUS), (CZ,))
    expected = CZ @ np.kron(PLUS, PLUS)
    assert np.abs(prepare_mps(recipe).amplitudes - expected).max() < 1e-12
    assert np.allclose(expected, np.array([1, 1, 1, -1]) / 2)


def test_ghz_three_sequential_oracle():
    # oracle: apply the chain by hand with kron-extended matrices
    expected = np.kron(np.eye(2), CNOT) @ np.kron(CNOT, np.eye(2)) @ np.kron(
        np.kron(PLUS, KET0), KET0
    )
    out = prepare_mps(preset_recipe("ghz", 3))
    assert np.abs(out.amplitudes - expected).max() < 1e-12
    assert np.abs(expected - ghz_amplitudes(3)).max() < 1e-12


@pytest.mark.parametrize("n", range(2, 11))
def test_cluster_preset_closed_form(n):
    out = prepare_mps(preset_recipe("cluster1d", n))
    assert np.abs(out.amplitudes - cluster_amplitudes(n)).max() < 1e-10


@pytest.mark.parametrize("n", range(2, 11))
def test_ghz_preset_closed_form(n):
    out = prepare_mps(preset_recipe("ghz", n))
    assert np.abs(out.amplitudes - ghz_amplitudes(n)).max() < 1e-10


@pytest.mark.parametrize("n", range(2, 11))
def test_w_preset_closed_form(n):
    out = prepare_mps(preset_recipe("w", n))
    assert np.abs(out.amplitudes - w_amplitudes(n)).max() < 1e-10


def test_preset_rejects_small_n():
    with pytest.raises(ValueError):
        preset_recipe("ghz", 1)
    with pytest.raises(ValueError):
        preset_recipe("nope", 3)


def test_excitation_rotation_action():
    theta = 0.83
    g = excitation_rotation(theta)
    ket10 = np.kron(KET1, KET0)
    expected = np.cos(theta) * ket10 + np.sin(theta) * np.kron(KET0, KET1)
    assert np.abs(g @ ket10 - expected).max() < 1e-12
    assert np.abs(g @ np.kron(KET0, KET0) - np.kron(KET0, KET0)).max() < 1e-12


def test_excitation_sandwiches_compose_to_rotation():
    # the W chain gate is outside the single-CZ class, so two layers
    for theta in (0.3, 0.9553, 1.2):
        first, second = _excitation_sandwiches(theta)
        composed = second.matrix() @ first.matrix()
        assert np.abs(composed - excitation_rotation(theta)).max() < 1e-12


@pytest.mark.parametrize("kind,n", [("cluster1d", 3), ("ghz", 3), ("w", 3), ("cluster1d", 5)])
def test_prepare_via_rus_matches_ideal(kind, n):
    recipe = preset_recipe(kind, n)
    ideal = prepare_mps(recipe)
    for seed in (0, 1, 2):
        out, transcripts = prepare_via_rus(recipe, np.random.default_rng(seed))
        assert fidelity_up_to_phase(out, ideal) > 1 - 1e-10
        assert all(t.succeeded for t in transcripts)


def test_prepare_via_rus_transcript_count():
    _, transcripts = prepare_via_rus(preset_recipe("cluster1d", 5), np.random.default_rng(0))
    assert len(transcripts) == 4  # one gate per bond
    _, transcripts = prepare_via_rus(preset_recipe("w", 5), np.random.default_rng(0))
    assert len(transcripts) == 8  # two layers per bond


def test_prepare_via_rus_total_rounds():
    rng = np.random.default_rng(314)
    totals = []
    recipe = preset_recipe("cluster1d", 5)
    for _ in range(400):
        _, transcripts = prepare_via_rus(recipe, rng)
        totals.append(sum(t.rounds_used for t in transcripts))
    assert np.mean(totals) == pytest.approx(8.0, abs=0.3)  # four gates, two rounds each


def test_prepare_via_rus_rejects_raw_matrix():
    recipe = MpsRecipe(2, (PLUS, PLUS), (CZ,))
    with pytest.raises(RecipeError):
        prepare_via_rus(recipe, np.random.default_rng(0))


def test_recipe_validation():
    with pytest.raises(ValueError):
        MpsRecipe(1, (KET0,), ())
    with pytest.raises(RecipeError):
        MpsRecipe(3, (KET0,) * 3, (np.eye(4),))  # gate count off by one
    with pytest.raises(RecipeError):
        MpsRecipe(2, (np.array([1.0, 1.0]), KET0), (np.eye(4),))  # unnormalized
    with pytest.raises(RecipeError):
        MpsRecipe(2, (KET0, KET0), (np.diag([1, 1, 1, 2]),))  # not unitary


def test_recipe_json_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    recipe = MpsRecipe(
        3,
        (PLUS, KET1, np.array([1, 1j]) / np.sqrt(2)),
        (haar_unitary(4, rng), CzSandwich(pre=(I2, H), post=(I2, H))),
    )
    path = tmp_path / "recipe.json"
    save_recipe(recipe, path)
    loaded = load_recipe(path)
    assert loaded.n == 3
    for k in range(2):
        assert np.abs(loaded.gate_matrix(k) - recipe.gate_matrix(k)).max() < 1e-15
    assert np.abs(prepare_mps(loaded).amplitudes - prepare_mps(recipe).amplitudes).max() < 1e-12


def test_w_recipe_json_round_trip(tmp_path):
    recipe = preset_recipe("w", 4)
    path = tmp_path / "w.json"
    save_recipe(recipe, path)
    loaded = load_recipe(path)
    out, _ = prepare_via_rus(loaded, np.random.default_rng(3))
    assert np.abs(out.amplitudes - w_amplitudes(4)).max() < 1e-10


def test_malformed_recipe_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2, "initial": [[[1,0],[0,0]]]}')
    with pytest.raises(RecipeError):
        load_recipe(path)


def test_locality_of_removed_gate():
    # replacing one cluster gate with identity must factorize the chain
    # exactly across that bond and leave it entangled across the others
    n, cut = 5, 2
    recipe = preset_recipe("cluster1d", n)
    gates = list(recipe.gates)
    gates[cut] = np.eye(4)
    out = prepare_mps(MpsRecipe(n, recipe.initial, tuple(gates)))
    assert schmidt_rank(out.amplitudes, cut + 1, n) == 1
    assert schmidt_rank(out.amplitudes, cut, n) > 1
    full = prepare_mps(recipe)
    assert schmidt_rank(full.amplitudes, cut + 1, n) > 1
