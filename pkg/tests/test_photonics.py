import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timebinsim.photonics import (
    EmissionReport,
    encode_qubit_to_photon,
    map_all_sources,
    map_source_to_photon,
    readout_source,
)
from timebinsim.qstate import (
    PHOTON,
    StateVector,
    TargetError,
    fidelity_up_to_phase,
    measure_in_basis,
    product_state,
    source_register,
)

from helpers import KET0, KET1, PLUS, haar_state

Z_BASIS = np.eye(2)


def test_encode_basis_branch():
    st_ = product_state(source_register(1), [KET0])
    out, report = encode_qubit_to_photon(st_, "s0")
    assert report == EmissionReport("s0", "s0.ph0", "encode", True)
    assert out.basis_labels() == ["0E", "0L", "1E", "1L"]
    assert out.amplitudes[0] == 1.0  # |0;E>


def test_encode_plus_gives_entangled_pair():
    st_ = product_state(source_register(1), [PLUS])
    out, _ = encode_qubit_to_photon(st_, "s0")
    # (|0,E> + |1,L>)/sqrt(2), maximally entangled source-photon pair
    assert np.allclose(out.amplitudes, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)], atol=1e-12)


def test_encode_first_source_of_two_qubit_state():
    # brute-force oracle: g|10> + d|11> -> g|10;L> + d|11;L>
    rng = np.random.default_rng(5)
    g, d = haar_state(2, rng)
    st_ = StateVector(source_register(2), [0, 0, g, d])
    out, _ = encode_qubit_to_photon(st_, "s0")
    expected = np.zeros(8, dtype=complex)
    expected[0b101] = g  # |1 0 ; L>
    expected[0b111] = d  # |1 1 ; L>
    assert np.allclose(out.amplitudes, expected, atol=1e-12)


def test_encode_parked_source_rejected():
    st_ = product_state(source_register(1), [PLUS])
    mapped, _ = map_source_to_photon(st_, "s0")
    with pytest.raises(TargetError):
        encode_qubit_to_photon(mapped, "s0")


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1))
def test_encoding_correlation(seed):
    # measuring photon then source always yields matching labels (E<->0, L<->1)
    rng = np.random.default_rng(seed)
    st_ = StateVector(source_register(1), haar_state(2, rng))
    out, rep = encode_qubit_to_photon(st_, "s0")
    ph = measure_in_basis(out, (rep.photon_id,), Z_BASIS, rng)
    src = measure_in_basis(ph.post_state, ("s0",), Z_BASIS, rng)
    assert ph.outcome_index == src.outcome_index


def test_double_encoding_collapse():
    st_ = product_state(source_register(1), [PLUS])
    out, rep = encode_qubit_to_photon(st_, "s0")
    rec = measure_in_basis(out, (rep.photon_id,), Z_BASIS, np.random.default_rng(2), force=0)
    assert np.allclose(rec.post_state.amplitudes, KET0, atol=1e-12)


def test_map_basis_branch():
    st_ = product_state(source_register(1), [KET1])
    out, report = map_source_to_photon(st_, "s0")
    assert report.succeeded and report.mode == "map"
    assert readout_source(out, "s0") is True
    assert np.allclose(out.amplitudes, KET1, atol=1e-12)  # photon |L>
    assert out.layout.active[0].kind == PHOTON


def test_map_preserves_phase_coefficients():
    st_ = product_state(source_register(1), [np.array([1, 1j]) / np.sqrt(2)])
    out, _ = map_source_to_photon(st_, "s0")
    assert np.allclose(out.amplitudes, [1 / np.sqrt(2), 1j / np.sqrt(2)], atol=1e-12)


def test_map_one_source_of_entangled_pair():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    st_ = StateVector(source_register(2), bell)
    out, _ = map_source_to_photon(st_, "s0")
    assert readout_source(out, "s0") is True
    assert readout_source(out, "s1") is False
    # remaining register (s1, photon): (|0;E> + |1;L>)/sqrt(2)
    assert np.allclose(out.amplitudes, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)], atol=1e-12)


def test_map_all_ghz_three_sources():
    # oracle: mapping source by source must leave the GHZ coefficients
    ghz = np.zeros(8)
    ghz[0] = ghz[7] = 1 / np.sqrt(2)
    st_ = StateVector(source_register(3), ghz)
    out, reports = map_all_sources(st_)
    assert [r.succeeded for r in reports] == [True] * 3
    assert out.basis_labels()[0] == "EEE"
    assert np.allclose(out.amplitudes, ghz, atol=1e-12)


def test_map_all_product_basis_state():
    st_ = product_state(source_register(2), [KET0, KET1])
    out, _ = map_all_sources(st_)
    labels = out.basis_labels()
    assert labels[int(np.argmax(np.abs(out.amplitudes)))] == "EL"


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_map_all_random_state_amplitudes(seed):
    rng = np.random.default_rng(seed)
    amps = haar_state(16, rng)
    st_ = StateVector(source_register(4), amps)
    out, reports = map_all_sources(st_)
    assert len(out.amplitudes) == 16  # 2^N photon coefficients
    assert np.abs(out.amplitudes - amps).max() < 1e-12
    assert all(readout_source(out, f"s{i}") for i in range(4))


def test_mapping_amplitude_fidelity():
    rng = np.random.default_rng(31)
    amps = haar_state(8, rng)
    st_ = StateVector(source_register(3), amps)
    out, _ = map_all_sources(st_)
    relabeled = StateVector(out.layout, amps)  # 0 -> E, 1 -> L keeps indices
    assert fidelity_up_to_phase(out, relabeled) == 1.0


def test_map_all_requires_active_source():
    st_ = product_state(source_register(1), [KET0])
    mapped, _ = map_all_sources(st_)
    with pytest.raises(TargetError):
        map_all_sources(mapped)


def test_readout_before_any_emission():
    st_ = product_state(source_register(1), [KET0])
    assert readout_source(st_, "s0") is False


def test_readout_unknown_id():
    st_ = product_state(source_register(1), [KET0])
    with pytest.raises(TargetError):
        readout_source(st_, "ghost")


def test_failed_emission_leaves_state_untouched():
    st_ = product_state(source_register(1), [PLUS])
    rng = np.random.default_rng(0)
    # efficiency 0 always fails
    out, report = map_source_to_photon(st_, "s0", efficiency=0.0, rng=rng)
    assert not report.succeeded and report.photon_id is None
    assert out is st_
    assert readout_source(out, "s0") is False


def test_emission_success_frequency():
    # Bernoulli oracle: mean 0.8, three-sigma band well inside +-0.02
    rng = np.random.default_rng(123)
    st_ = product_state(source_register(1), [PLUS])
    hits = 0
    trials = 10_000
    for _ in range(trials):
        out, _ = map_source_to_photon(st_, "s0", efficiency=0.8, rng=rng)
        hits += readout_source(out, "s0")
    assert abs(hits / trials - 0.8) < 0.02


def test_loss_requires_rng():
    st_ = product_state(source_register(1), [PLUS])
    with pytest.raises(ValueError):
        encode_qubit_to_photon(st_, "s0", efficiency=0.5)
