import json
from fractions import Fraction

import mpmath as mp
import pytest

from ctori.arith_data import (
    ArithDataError,
    DirichletCharacter,
    FIXTURE_LABELS,
    NumberFieldRecord,
    fetch_remote,
    load_fixture,
    parse_nfrec,
    residue_rho,
    serialize_nfrec,
)
from ctori.l_series import dirichlet_l_at_1
from ctori.special_values import chi_field_generator

mp.mp.dps = 50


def test_fixture_q():
    rec = load_fixture("Q")
    assert (rec.degree, rec.r1, rec.r2, rec.disc, rec.h, rec.w) == (1, 1, 0, 1, 1, 2)
    assert rec.regulator() == 1


def test_fixture_qi():
    rec = load_fixture("Q(i)")
    assert (rec.degree, rec.r1, rec.r2, rec.disc, rec.h, rec.w) == (2, 0, 1, -4, 1, 4)


def test_fixture_qsqrt5():
    rec = load_fixture("Q(sqrt5)")
    assert rec.disc == 5 and rec.h == 1 and rec.w == 2
    with mp.workdps(50):
        assert abs(rec.regulator() - mp.log((1 + mp.sqrt(5)) / 2)) < mp.mpf(10) ** -49


def test_unknown_fixture_lists_menu():
    with pytest.raises(ArithDataError) as e:
        load_fixture("Q(sqrt7)")
    for label in FIXTURE_LABELS:
        assert label in str(e.value)


def test_residue_rho_examples():
    assert abs(residue_rho(load_fixture("Q")) - 1) < mp.mpf(10) ** -45
    assert abs(residue_rho(load_fixture("Q(i)")) - mp.pi / 4) < mp.mpf(10) ** -45
    rho5 = residue_rho(load_fixture("Q(sqrt5)"))
    expected = 2 * mp.log((1 + mp.sqrt(5)) / 2) / mp.sqrt(5)
    assert abs(rho5 - expected) < mp.mpf(10) ** -45


def test_rho_reciprocal_identity_all_fixtures():
    for label in FIXTURE_LABELS:
        rec = load_fixture(label)
        prod = residue_rho(rec) * chi_field_generator(rec)
        assert abs(prod - 1) < mp.mpf(10) ** -40, label


def test_rho_matches_character_product():
    for label in FIXTURE_LABELS:
        rec = load_fixture(label)
        if rec.degree == 1:
            continue
        prod = mp.mpf(1)
        for chi in rec.characters:
            prod *= dirichlet_l_at_1(chi)
        prod = prod.real if isinstance(prod, mp.mpc) else prod
        assert abs(prod - residue_rho(rec)) < mp.mpf(10) ** -9, label


def test_nfrec_roundtrip_byte_identical():
    for label in FIXTURE_LABELS:
        rec = load_fixture(label)
        text = serialize_nfrec(rec)
        assert serialize_nfrec(parse_nfrec(text)) == text


def test_record_invariants_enforced():
    with pytest.raises(ArithDataError):
        NumberFieldRecord("bad", 3, 1, 0, 5, 1, "1.0", 2)  # degree != r1+2r2
    with pytest.raises(ArithDataError):
        NumberFieldRecord("bad", 1, 1, 0, 1, 1, "1.0", 3)  # odd w


def test_cache_roundtrip(tmp_path):
    rec = fetch_remote("Q(i)", cache_dir=tmp_path)
    cached = (tmp_path / "Q(i).nfrec").read_text()
    rec2 = fetch_remote("Q(i)", cache_dir=tmp_path)
    assert serialize_nfrec(rec) == cached == serialize_nfrec(rec2)


def test_offline_uncached_error(tmp_path):
    with pytest.raises(ArithDataError, match="offline and uncached"):
        fetch_remote("Q(sqrt7)", cache_dir=tmp_path)


def test_fetch_remote_mapping(tmp_path):
    # canned remote payload for the sqrt(2) field exercises the field mapping
    payload = {"data": [{
        "label": "2.2.8.1", "degree": 2, "r2": 0, "disc_abs": 8, "disc_sign": 1,
        "class_number": 1, "regulator": "0.8813735870195430",
        "torsion_order": 2,
    }]}

    def transport(url):
        assert "nf_fields" in url and "2.2.8.1" in url
        return json.dumps(payload)

    rec = fetch_remote("sqrt2-remote", remote_key="2.2.8.1", enable_network=True,
                       cache_dir=tmp_path, transport=transport)
    assert rec.disc == 8 and rec.h == 1 and rec.r1 == 2
    with mp.workdps(15):
        assert abs(rec.regulator(15) - mp.log(1 + mp.sqrt(2))) < 1e-14
    # second call comes from the cache, byte-identical
    rec2 = fetch_remote("sqrt2-remote", cache_dir=tmp_path)
    assert serialize_nfrec(rec2) == serialize_nfrec(rec)


def test_remote_schema_drift_detected(tmp_path):
    def transport(url):
        return json.dumps({"data": [{"degree": 2}]})

    with pytest.raises(ArithDataError, match="schema drift"):
        fetch_remote("whatever", enable_network=True, cache_dir=tmp_path,
                     transport=transport)


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------

def test_character_validation():
    with pytest.raises(ArithDataError):
        DirichletCharacter.from_map(4, {1: 0})  # incomplete table
    with pytest.raises(ArithDataError):
        DirichletCharacter.from_map(4, {1: 0, 3: Fraction(1, 3)})  # not multiplicative
    chi = DirichletCharacter.from_map(4, {1: 0, 3: Fraction(1, 2)})
    assert chi.is_primitive() and chi.is_odd() and chi.is_real()


def test_character_primitivity():
    # the character mod 8 that factors through mod 4 is imprimitive
    chi8 = DirichletCharacter.from_map(8, {1: 0, 3: Fraction(1, 2), 5: 0, 7: Fraction(1, 2)})
    assert not chi8.is_primitive()
    with pytest.raises(ArithDataError, match="primitive"):
        dirichlet_l_at_1(chi8)
    chi8p = DirichletCharacter.from_map(8, {1: 0, 3: Fraction(1, 2), 5: Fraction(1, 2), 7: 0})
    assert chi8p.is_primitive()


def test_trivial_character_rejected():
    chi = DirichletCharacter.from_map(3, {1: 0, 2: 0})
    with pytest.raises(ArithDataError):
        dirichlet_l_at_1(chi)
