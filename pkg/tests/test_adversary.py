import math

import numpy as np
import pytest

from qdleak import qcore
from qdleak.adversary import (
    EveModel,
    InterceptResend,
    PassiveListener,
    announcement_space_bits,
    enumerate_posterior,
    eve_guess,
    intercept_resend,
    known_xor,
    leakage_exact,
    leakage_monte_carlo,
    make_eve,
    mm_inputs,
    xor_bits,
)
from qdleak.protocols import (
    BellResult,
    PhotonResult,
    ProtocolKind,
    run_mm,
    simulate_mm,
)
from qdleak.qcore import KET, BellOutcome

EPR, DENSE, PHOTON = ProtocolKind.EPR_QD, ProtocolKind.DENSE_KEY, ProtocolKind.SINGLE_PHOTON


def test_posterior_epr_psi_minus():
    row = enumerate_posterior(EPR).rows[BellResult(BellOutcome.PSI_MINUS)]
    assert row.probs == pytest.approx(
        {("00", "00"): 0.25, ("01", "01"): 0.25, ("10", "10"): 0.25, ("11", "11"): 0.25}
    )


def test_posterior_epr_shape():
    rows = enumerate_posterior(EPR).rows
    assert len(rows) == 4
    assert all(len(r.probs) == 4 for r in rows.values())


def test_posterior_dense_phi_minus():
    row = enumerate_posterior(DENSE).rows[BellResult(BellOutcome.PHI_MINUS)]
    assert row.probs == pytest.approx({("0", "1"): 0.5, ("1", "0"): 0.5})


def test_posterior_photon():
    row = enumerate_posterior(PHOTON).rows[PhotonResult("+", "-")]
    assert row.probs == pytest.approx({("0", "1"): 0.5, ("1", "0"): 0.5})


def test_leakage_exact_epr():
    r = leakage_exact(EPR)
    assert r.h_prior_bits == pytest.approx(4.0, abs=1e-12)
    assert r.h_posterior_bits == pytest.approx(2.0, abs=1e-12)
    assert r.i_abe_bits == pytest.approx(2.0, abs=1e-12)
    assert r.holevo_chi_bits == pytest.approx(2.0, abs=1e-10)
    assert r.holevo_violation


@pytest.mark.parametrize("kind", [DENSE, PHOTON])
def test_leakage_exact_one_bit(kind):
    r = leakage_exact(kind)
    assert r.h_prior_bits == pytest.approx(2.0, abs=1e-12)
    assert r.i_abe_bits == pytest.approx(1.0, abs=1e-12)


def test_report_invariants():
    for kind in ProtocolKind:
        r = leakage_exact(kind)
        assert abs(r.i_abe_bits - (r.h_prior_bits - r.h_posterior_bits)) < 1e-9
        assert r.holevo_violation == (r.claimed_bits_per_run > r.holevo_chi_bits + 1e-9)
        assert r.i_abe_bits <= announcement_space_bits(kind) + 1e-12


def test_announcement_space_sizes():
    assert announcement_space_bits(EPR) == 2.0
    assert announcement_space_bits(DENSE) == 1.0
    assert announcement_space_bits(PHOTON) == 1.0


@pytest.mark.parametrize("kind", list(ProtocolKind))
def test_monte_carlo_agrees_with_exact(kind):
    mc = leakage_monte_carlo(kind, 20000, seed=3)
    assert mc.method == "monte-carlo" and mc.rounds == 20000
    assert abs(mc.i_abe_bits - leakage_exact(kind).i_abe_bits) < 0.05


def test_monte_carlo_single_round():
    r = leakage_monte_carlo(EPR, 1, seed=0)
    assert len(r.posterior.rows) == 1
    assert r.i_abe_bits == pytest.approx(0.0, abs=1e-12)


def test_monte_carlo_rejects_zero_rounds():
    with pytest.raises(ValueError):
        leakage_monte_carlo(EPR, 0, seed=0)


def test_monte_carlo_reproducible():
    a = leakage_monte_carlo(DENSE, 500, seed=8)
    b = leakage_monte_carlo(DENSE, 500, seed=8)
    assert a.i_abe_bits == b.i_abe_bits


# -- Eve's inference ---------------------------------------------------------


def test_eve_guess_examples():
    g = eve_guess(EPR, BellResult(BellOutcome.PSI_PLUS))
    assert set(g.candidates) == {("11", "00"), ("10", "01"), ("01", "10"), ("00", "11")}
    assert g.p_correct == 0.25
    g = eve_guess(DENSE, BellResult(BellOutcome.PSI_MINUS))
    assert g.known == "0" and g.p_correct == 0.5
    g = eve_guess(PHOTON, PhotonResult("0", "1"))
    assert g.known == "1" and g.p_correct == 0.5


@pytest.mark.parametrize("kind", list(ProtocolKind))
def test_relation_holds_exhaustively(kind):
    for inp, _ in mm_inputs(kind):
        (ann,) = run_mm(inp).announcements
        assert known_xor(kind, ann) == xor_bits(inp.alice_msg, inp.bob_msg)
        assert (inp.alice_msg, inp.bob_msg) in eve_guess(kind, ann).candidates


@pytest.mark.parametrize("kind", list(ProtocolKind))
def test_guess_calibration(kind):
    # Average the hit indicator over the uniform guess instead of sampling it.
    inputs = mm_inputs(kind)
    expected_hits = 0.0
    for inp, w in inputs:
        (ann,) = run_mm(inp).announcements
        g = eve_guess(kind, ann)
        hit = sum(c == (inp.alice_msg, inp.bob_msg) for c in g.candidates) / len(g.candidates)
        expected_hits += w * hit
        assert hit == pytest.approx(g.p_correct)
    assert expected_hits == pytest.approx(1 / len(g.candidates))


def test_eve_guess_with_rng_stays_in_candidates():
    rng = np.random.default_rng(0)
    g = eve_guess(EPR, BellResult(BellOutcome.PHI_PLUS), rng)
    assert g.best_guess in g.candidates


# -- channel attacks ---------------------------------------------------------


def test_intercept_resend_single_qubit():
    outs = []
    for seed in range(200):
        out = intercept_resend(KET["0"], np.random.default_rng(seed))
        assert any(qcore.equal_up_to_phase(out, KET[k]) for k in ("0", "+", "-"))
        outs.append(out)
    z_count = sum(qcore.equal_up_to_phase(o, KET["0"]) for o in outs)
    assert 0.35 < z_count / 200 < 0.65


@pytest.mark.parametrize("kind", list(ProtocolKind))
def test_passive_listener_leaves_records_unchanged(kind):
    quiet = list(simulate_mm(kind, 200, seed=17))
    eve = PassiveListener()
    heard = list(simulate_mm(kind, 200, seed=17, eve=eve))
    assert quiet == heard
    assert eve.heard == [r.announcements[0] for r in heard]


def test_intercept_resend_breaks_decoding_sometimes():
    recs = list(simulate_mm(EPR, 400, seed=2, eve=InterceptResend()))
    acc = sum(r.decoded_ok for r in recs) / len(recs)
    assert acc < 0.9


def test_make_eve():
    assert make_eve(EveModel.NONE) is None
    assert isinstance(make_eve(EveModel.PASSIVE), PassiveListener)
    assert isinstance(make_eve(EveModel.INTERCEPT_RESEND), InterceptResend)


def test_leak_is_half_the_secret():
    for kind in ProtocolKind:
        r = leakage_exact(kind)
        assert math.isclose(r.i_abe_bits, r.h_prior_bits / 2, abs_tol=1e-12)
