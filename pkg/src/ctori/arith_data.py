"""Number-field invariants: bundled fixtures, an optional remote database
client with a local cache, and residue assembly.

Records follow the "nfrec-v1" text schema (one record per file):

    nfrec-v1
    label Q(i)
    degree 2
    signature 0 1
    disc -4
    class_number 1
    regulator 1.0
    roots_of_unity 4
    ramified 2:2
    character 4 : 1=0 3=1/2

``regulator`` is a decimal string (50 digits for the bundled fixtures),
``ramified`` lines are prime:conductor-exponent pairs, and ``character``
lines give a Dirichlet character of the field's abelian character group as
modulus : residue=exponent rows, where the value at a residue is
exp(2*pi*i*exponent).  Blank lines and '#' comments are ignored.
"""

from __future__ import annotations

import json
import os
import urllib.request
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from pathlib import Path

import mpmath as mp
from filelock import FileLock


class ArithDataError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod f, values stored as exact root-of-unity
    exponents: value(a) = exp(2*pi*i*exponents[a])."""

    modulus: int
    exponents: tuple[tuple[int, Fraction], ...]  # sorted (residue, exponent in [0,1))

    @staticmethod
    def from_map(modulus: int, mapping: dict[int, Fraction]) -> "DirichletCharacter":
        f = int(modulus)
        cleaned = {}
        for a, t in mapping.items():
            a = a % f
            if gcd(a, f) != 1:
                raise ArithDataError(f"character value at {a} not coprime to the modulus {f}")
            cleaned[a] = Fraction(t) % 1
        units = [a for a in range(1, f + 1) if gcd(a, f) == 1] if f > 1 else [0]
        if f == 1:
            raise ArithDataError("modulus must exceed 1")
        missing = [a for a in units if a not in cleaned]
        if missing:
            raise ArithDataError(f"character table incomplete: missing residues {missing}")
        chi = DirichletCharacter(f, tuple(sorted(cleaned.items())))
        chi._check_multiplicative()
        return chi

    def _table(self) -> dict[int, Fraction]:
        return dict(self.exponents)

    def _check_multiplicative(self):
        tab = self._table()
        if tab[1 % self.modulus] % 1 != 0:
            raise ArithDataError("character value at 1 must be 1")
        units = list(tab)
        for a in units:
            for b in units:
                if (tab[a] + tab[b] - tab[a * b % self.modulus]) % 1 != 0:
                    raise ArithDataError("character table is not multiplicative")

    def exponent(self, a: int) -> Fraction | None:
        """None when gcd(a, f) > 1 (the value is 0)."""
        a %= self.modulus
        return self._table().get(a)

    def is_trivial(self) -> bool:
        return all(t % 1 == 0 for _, t in self.exponents)

    def is_odd(self) -> bool:
        t = self.exponent(self.modulus - 1)
        return t is not None and t % 1 == Fraction(1, 2)

    def is_real(self) -> bool:
        return all((2 * t) % 1 == 0 for _, t in self.exponents)

    def is_primitive(self) -> bool:
        f = self.modulus
        tab = self._table()
        for d in range(1, f):
            if f % d != 0:
                continue
            if all(tab[a] % 1 == 0 for a in tab if a % d == 1 % d):
                return False
        return True

    def value_mp(self, a: int):
        t = self.exponent(a)
        if t is None:
            return mp.mpf(0)
        return mp.expjpi(2 * mp.mpf(t.numerator) / mp.mpf(t.denominator))

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus,
                                  tuple((a, (-t) % 1) for a, t in self.exponents))

    def gauss_sum_mp(self):
        f = self.modulus
        total = mp.mpc(0)
        for a, t in self.exponents:
            total += self.value_mp(a) * mp.expjpi(2 * mp.mpf(a) / mp.mpf(f))
        return total


# ---------------------------------------------------------------------------
# Number field records
# ---------------------------------------------------------------------------

@dataclass
class NumberFieldRecord:
    label: str
    degree: int
    r1: int
    r2: int
    disc: int
    h: int
    regulator_str: str
    w: int
    ramified: tuple[tuple[int, int], ...] = ()  # (prime, conductor exponent)
    characters: tuple[DirichletCharacter, ...] = ()

    def __post_init__(self):
        if self.degree != self.r1 + 2 * self.r2:
            raise ArithDataError(f"{self.label}: degree must equal r1 + 2*r2")
        if abs(self.disc) < 1 or self.h < 1:
            raise ArithDataError(f"{self.label}: |disc| and h must be >= 1")
        if self.w % 2:
            raise ArithDataError(f"{self.label}: the number of roots of unity is even")
        if self.unit_rank == 0 and self.regulator_str.strip() not in ("1", "1.0"):
            # regulator 1 by convention at unit rank zero
            if mp.mpf(self.regulator_str) != 1:
                raise ArithDataError(f"{self.label}: regulator must be 1 at unit rank 0")

    @property
    def unit_rank(self) -> int:
        return self.r1 + self.r2 - 1

    def regulator(self, dps: int = 50):
        with mp.workdps(dps):
            R = mp.mpf(self.regulator_str)
            if R <= 0:
                raise ArithDataError(f"{self.label}: regulator must be positive")
            return R

    def is_abelian_resolvable(self) -> bool:
        return self.degree == 1 or bool(self.characters)


def residue_rho(record: NumberFieldRecord, dps: int = 50):
    """Residue of the zeta function of the field at s = 1:
    2^r1 (2π)^r2 h R / (w sqrt(|disc|))."""
    with mp.workdps(dps):
        num = mp.mpf(2) ** record.r1 * (2 * mp.pi) ** record.r2 * record.h * record.regulator(dps)
        den = record.w * mp.sqrt(abs(record.disc))
        return num / den


# ---------------------------------------------------------------------------
# nfrec-v1 parsing and serialization
# ---------------------------------------------------------------------------

def parse_nfrec(text: str) -> NumberFieldRecord:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != "nfrec-v1":
        raise ArithDataError("not an nfrec-v1 record")
    fields: dict[str, str] = {}
    ramified = []
    characters = []
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        rest = rest.strip()
        if key == "ramified":
            for tok in rest.split():
                p, _, e = tok.partition(":")
                ramified.append((int(p), int(e)))
        elif key == "character":
            mod_s, _, table = rest.partition(":")
            table = table.strip()
            mapping = {}
            for tok in table.split():
                a, _, t = tok.partition("=")
                mapping[int(a)] = Fraction(t)
            characters.append(DirichletCharacter.from_map(int(mod_s), mapping))
        else:
            fields[key] = rest
    try:
        r1, r2 = (int(x) for x in fields["signature"].split())
        return NumberFieldRecord(
            label=fields["label"],
            degree=int(fields["degree"]),
            r1=r1, r2=r2,
            disc=int(fields["disc"]),
            h=int(fields["class_number"]),
            regulator_str=fields["regulator"],
            w=int(fields["roots_of_unity"]),
            ramified=tuple(ramified),
            characters=tuple(characters),
        )
    except KeyError as e:
        raise ArithDataError(f"nfrec-v1 record missing field {e.args[0]!r}") from None


def serialize_nfrec(rec: NumberFieldRecord) -> str:
    lines = ["nfrec-v1",
             f"label {rec.label}",
             f"degree {rec.degree}",
             f"signature {rec.r1} {rec.r2}",
             f"disc {rec.disc}",
             f"class_number {rec.h}",
             f"regulator {rec.regulator_str}",
             f"roots_of_unity {rec.w}"]
    if rec.ramified:
        lines.append("ramified " + " ".join(f"{p}:{e}" for p, e in rec.ramified))
    for chi in rec.characters:
        table = " ".join(f"{a}={t}" for a, t in chi.exponents)
        lines.append(f"character {chi.modulus} : {table}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Bundled fixtures
# ---------------------------------------------------------------------------

FIXTURE_DIR = Path(__file__).parent / "fixtures"

FIXTURE_LABELS = ("Q", "Q(i)", "Q(sqrt-3)", "Q(sqrt5)", "Q(sqrt2)", "Q(zeta5)")

_FIXTURE_FILES = {
    "Q": "q.nfrec",
    "Q(i)": "qi.nfrec",
    "Q(sqrt-3)": "qsqrtm3.nfrec",
    "Q(sqrt5)": "qsqrt5.nfrec",
    "Q(sqrt2)": "qsqrt2.nfrec",
    "Q(zeta5)": "qzeta5.nfrec",
}


def load_fixture(label: str) -> NumberFieldRecord:
    """Load one of the bundled field records; unknown labels list the menu."""
    try:
        fname = _FIXTURE_FILES[label]
    except KeyError:
        raise ArithDataError(
            f"unknown fixture {label!r}; available: {', '.join(FIXTURE_LABELS)}") from None
    return parse_nfrec((FIXTURE_DIR / fname).read_text())


# ---------------------------------------------------------------------------
# Remote client (feature-gated; offline runs use cache and fixtures only)
# ---------------------------------------------------------------------------

REMOTE_API = "https://www.lmfdb.org/api/nf_fields/"

# pinned mapping from the remote schema to nfrec-v1 fields
REMOTE_FIELD_MAP = {
    "label": "label",
    "degree": "degree",
    "r2": "r2",
    "disc_abs": "disc_abs",
    "disc_sign": "disc_sign",
    "class_number": "class_number",
    "regulator": "regulator",
    "torsion_order": "torsion_order",
}


def _default_cache_dir() -> Path:
    base = os.environ.get("CTORI_CACHE", os.path.join(os.path.expanduser("~"), ".cache", "ctori"))
    return Path(base)


def _map_remote_record(label: str, data: dict) -> NumberFieldRecord:
    missing = [k for k in REMOTE_FIELD_MAP.values() if k not in data]
    if missing:
        raise ArithDataError(
            f"remote schema drift: fields {missing} absent (mapping is pinned to nfrec-v1)")
    degree = int(data["degree"])
    r2 = int(data["r2"])
    disc = int(data["disc_sign"]) * int(data["disc_abs"])
    return NumberFieldRecord(
        label=label,
        degree=degree,
        r1=degree - 2 * r2,
        r2=r2,
        disc=disc,
        h=int(data["class_number"]),
        regulator_str=str(data["regulator"]),
        w=int(data["torsion_order"]),
        ramified=(),
        characters=(),
    )


def _http_fetch(url: str, timeout: float = 20.0) -> str:
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read().decode("utf-8")


def fetch_remote(label: str, remote_key: str | None = None, *, enable_network: bool = False,
                 cache_dir: Path | None = None, transport=None) -> NumberFieldRecord:
    """Fetch a field record from the remote database, with a local cache.

    Offline (the default), only the cache and bundled fixtures are
    consulted.  ``transport`` is an injectable url -> text function so the
    mapping can be tested without the network.
    """
    cache_dir = cache_dir or _default_cache_dir()
    cache_dir.mkdir(parents=True, exist_ok=True)
    safe = "".join(c if c.isalnum() or c in "()+-." else "_" for c in label)
    cache_file = cache_dir / f"{safe}.nfrec"
    lock = FileLock(str(cache_file) + ".lock")
    with lock:
        if cache_file.exists():
            return parse_nfrec(cache_file.read_text())
        if label in _FIXTURE_FILES:
            rec = load_fixture(label)
            cache_file.write_text(serialize_nfrec(rec))
            return rec
        if not enable_network:
            raise ArithDataError(f"offline and uncached: {label!r}")
        fetch = transport or _http_fetch
        key = remote_key or label
        url = f"{REMOTE_API}?label={key}&_format=json"
        try:
            payload = json.loads(fetch(url))
        except OSError as e:
            raise ArithDataError(f"network failure fetching {label!r}: {e}") from e
        rows = payload.get("data", [])
        if not rows:
            raise ArithDataError(f"remote database has no record for {label!r}")
        rec = _map_remote_record(label, rows[0])
        cache_file.write_text(serialize_nfrec(rec))
        return rec
