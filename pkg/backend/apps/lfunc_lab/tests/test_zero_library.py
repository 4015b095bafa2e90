import json

import numpy as np
import pytest
from mpmath import mpf

from app.characters import character_group, primitive_nonprincipal
from app.errors import AuditError, DomainError, IncompleteScanError, InsufficientZerosError
from app.models import ZeroSet
from app.zero_library import ZeroLibrary


def test_zeros_are_scanned_once_and_restricted(zero_library, chi4):
    zs = zero_library.zeros(chi4, 10.0)
    assert len(zs) == 1
    assert zero_library.available_height(chi4.label) >= 10.0
    assert len(zero_library.zeros(chi4, 5.0)) == 0
    assert chi4.label in zero_library.labels()


def test_extending_the_height_appends(zero_library, chi4):
    zs = zero_library.zeros(chi4, 14.0)
    gammas = zs.gammas()
    # 6.0209, 10.2437, 12.9880
    assert len(gammas) == 3
    assert np.all(np.diff(gammas) > 0)
    assert abs(gammas[1] - 10.243770304166) < 1e-8


def test_signed_ordinates_of_real_character_are_symmetric(zero_library, chi4):
    gam = zero_library.signed_ordinates(chi4, 10.0)
    assert gam.tolist() == pytest.approx([-6.020948904697596, 6.020948904697596])


def test_signed_ordinates_of_complex_character_use_the_conjugate(zero_library):
    chi = next(c for c in primitive_nonprincipal(5) if not c.is_real)
    gam = zero_library.signed_ordinates(chi, 8.0)
    negatives = -gam[gam < 0]
    conj = zero_library.zeros(chi.conjugate(), 8.0).gammas()
    assert sorted(negatives.tolist()) == pytest.approx(sorted(conj.tolist()))
    assert np.all(np.diff(gam) > 0)


def test_principal_and_imprimitive_are_rejected(zero_library):
    with pytest.raises(DomainError):
        zero_library.zeros(character_group(5).principal, 5.0)
    chi = next(c for c in character_group(12) if c.conductor == 4)
    with pytest.raises(DomainError):
        zero_library.zeros(chi, 5.0)


def test_no_scanning_without_permission(chi3):
    library = ZeroLibrary(auto_scan=False)
    with pytest.raises(InsufficientZerosError):
        library.zeros(chi3, 5.0)
    with pytest.raises(InsufficientZerosError):
        library.ensure([chi3], 5.0)


def test_cache_persists_and_is_reverified(tmp_path, chi4):
    cache = tmp_path / "zeros.jsonl"
    first = ZeroLibrary(cache_path=str(cache))
    zs = first.zeros(chi4, 8.0)
    lines = [json.loads(line) for line in cache.read_text().splitlines()]
    assert lines[-1]["gamma"] is None
    assert lines[0]["label"] == chi4.label

    second = ZeroLibrary(cache_path=str(cache), auto_scan=False)
    reloaded = second.zeros(chi4, 8.0)
    assert abs(float(reloaded.ordinates[0]) - float(zs.ordinates[0])) < 1e-20


def test_corrupted_cache_entry_fails_verification(tmp_path, chi4):
    cache = tmp_path / "zeros.jsonl"
    record = {"q": 4, "label": chi4.label, "gamma": "6.5", "prec_digits": 30, "height_scanned": 8.0}
    marker = dict(record, gamma=None)
    cache.write_text(json.dumps(record) + "\n" + json.dumps(marker) + "\n")
    library = ZeroLibrary(cache_path=str(cache), auto_scan=False)
    with pytest.raises(AuditError):
        library.zeros(chi4, 8.0)


def test_unreadable_cache_is_an_audit_error(tmp_path):
    cache = tmp_path / "zeros.jsonl"
    cache.write_text("{not json\n")
    with pytest.raises(AuditError):
        ZeroLibrary(cache_path=str(cache))


def test_interrupted_append_does_not_claim_its_height(tmp_path, chi4):
    cache = tmp_path / "zeros.jsonl"
    record = {"q": 4, "label": chi4.label, "gamma": "6.0209489046975965549", "prec_digits": 30,
              "height_scanned": 14.0}
    cache.write_text(json.dumps(record) + "\n")
    library = ZeroLibrary(cache_path=str(cache), auto_scan=False)
    assert library.available_height(chi4.label) == 0.0
    with pytest.raises(InsufficientZerosError):
        library.zeros(chi4, 14.0)


def test_cached_window_missing_zeros_is_incomplete(tmp_path, chi4):
    cache = tmp_path / "zeros.jsonl"
    ZeroLibrary(cache_path=str(cache)).zeros(chi4, 8.0)
    # a marker claiming 14 with the zeros at 10.24 and 12.99 lost
    marker = {"q": 4, "label": chi4.label, "gamma": None, "prec_digits": 30, "height_scanned": 14.0}
    with open(cache, "a", encoding="utf-8") as f:
        f.write(json.dumps(marker) + "\n")
    library = ZeroLibrary(cache_path=str(cache), auto_scan=False)
    with pytest.raises(IncompleteScanError) as info:
        library.zeros(chi4, 14.0)
    assert info.value.found == 1 and info.value.expected == 3


def test_central_order_is_zero_for_small_moduli(zero_library):
    for chi in character_group(7).nonprincipal():
        assert zero_library.central_order(chi) == 0


def test_unresolved_central_order_is_reported(chi4):
    library = ZeroLibrary()
    library.set_central_order(chi4.label, None)
    with pytest.raises(AuditError):
        library.central_order(chi4)


def test_near_coincidences_are_reported_not_merged():
    library = ZeroLibrary()
    library.add(ZeroSet("5:1", 20.0, [mpf("6.1836"), mpf("15.2")]))
    library.add(ZeroSet("5:3", 20.0, [mpf("6.18360001"), mpf("11.0")]))
    hits = library.near_coincidences()
    assert len(hits) == 1
    assert {hits[0][0], hits[0][1]} == {"5:1", "5:3"}
    assert len(library.zeros(character_group(5).by_exponents((1,)), 20.0)) == 2
