"""Batch command-line front end.

Each subcommand wraps exactly one library operation; reports are printed as
human text (``--json`` switches the final record to JSON where available).
Exit codes: 0 on success or a pass verdict, 1 on a fail verdict, 2 on input
errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import mpmath as mp

from . import arith_data, ctdata
from .constructible import (
    CTorusData,
    TfSheafData,
    PlaceCtx,
    ValidationError,
    WildReductionWarning,
    check_bidual,
    dualize_sheaf,
    dualize_torus,
    good_reduction_locus,
    k0_decompose,
)
from .conductors import ConductorError, base_change_conductor
from .groups import GroupStructureError
from .l_series import FFCurveData, OracleError, euler_product, ff_l_function
from .lattices import LatticeError
from .local_factors import SymbolicFactorProduct, local_factor_torus
from .special_values import VirtualOrderError, chi as chi_of, vanishing_order, verify_special_value

USAGE_ERRORS = (ValidationError, ctdata.FormatError, OracleError, GroupStructureError,
                LatticeError, ConductorError, arith_data.ArithDataError, VirtualOrderError,
                FileNotFoundError, ValueError)

DEFAULT_SEED = 20240811


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str]
    mode: str = "nf"
    truncate: int = 10000
    precision: int = 50
    tolerance: float = 1e-8
    oracle_path: str | None = None
    network: bool = False

    def __post_init__(self):
        if self.truncate <= 0:
            raise ValidationError("truncation bound must be positive")
        if self.precision < 15:
            raise ValidationError("precision must be at least 15 digits")
        if self.mode not in ("nf", "ff"):
            raise ValidationError("mode must be nf or ff")


def _load_document(path: str) -> ctdata.CtDocument:
    return ctdata.parse_ctdata(Path(path).read_text())


def _load_oracle(path: str, group):
    return ctdata.parse_oracle(Path(path).read_text(), group)


def _field_records(doc: ctdata.CtDocument, K, network: bool):
    records = {}
    for key in K.field_terms:
        label = doc.fields.get(key)
        if label is None:
            raise ValidationError(
                f"no [fields] assignment for the subgroup class {list(key)}; "
                "add a 'field ... = LABEL' line to the document")
        try:
            records[key] = arith_data.load_fixture(label)
        except arith_data.ArithDataError:
            records[key] = arith_data.fetch_remote(label, enable_network=network)
    return records


def _place_ctx(args, doc, oracle):
    data = doc.data
    place_arg = args.place
    if isinstance(data, CTorusData) and data.listed(place_arg) is not None:
        return place_arg
    kv = {}
    for tok in place_arg.split(","):
        k, _, v = tok.partition("=")
        kv[k.strip()] = v.strip()
    if "q" not in kv:
        raise ValidationError("--place must be a listed label or 'q=N[,frob=IDX]'")
    q = int(kv["q"])
    if "frob" in kv:
        return PlaceCtx.good(str(q), q, data.group, int(kv["frob"]))
    if oracle is not None:
        return oracle.place_ctx(str(q), data.group)
    if data.group.order == 1:
        return PlaceCtx.good(str(q), q, data.group, data.group.identity_index)
    raise ValidationError("place resolution needs --oracle (or an explicit frob=IDX) "
                          "for a nontrivial group")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ctori", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--json", action="store_true", help="machine-readable final record")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for random suites")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, oracle=False, precision=True):
        sp.add_argument("--input", required=True)
        if oracle:
            sp.add_argument("--oracle")
        if precision:
            sp.add_argument("--precision", type=int, default=50)

    sp = sub.add_parser("validate", help="parse a document and check its invariants")
    common(sp, precision=False)

    sp = sub.add_parser("dualize", help="dualize a sheaf/torus document")
    common(sp, precision=False)
    sp.add_argument("--output")

    sp = sub.add_parser("bidual-check", help="verify F = F^DD bit-exactly")
    sp.add_argument("--input")
    sp.add_argument("--random", type=int, default=0, metavar="N",
                    help="run N seeded-random instances instead of a document")

    sp = sub.add_parser("lfactor", help="local L-factor at one place")
    common(sp, oracle=True, precision=False)
    sp.add_argument("--place", required=True)

    sp = sub.add_parser("lseries", help="Euler product (nf) or exact series (ff)")
    common(sp, oracle=True)
    sp.add_argument("--s", type=float, default=2.0)
    sp.add_argument("--truncate", type=int, default=10000)
    sp.add_argument("--mode", choices=("nf", "ff"), default="nf")
    sp.add_argument("--curve-q", type=int, default=2)
    sp.add_argument("--cutoff", type=int, default=12)

    sp = sub.add_parser("conductor", help="base-change conductors per place")
    common(sp)

    sp = sub.add_parser("decompose", help="K0 decomposition into generator classes")
    common(sp, precision=False)

    sp = sub.add_parser("chi", help="Euler characteristic via the decomposition")
    common(sp)
    sp.add_argument("--mode", choices=("nf", "ff"), default="nf")
    sp.add_argument("--curve-q", type=int, default=2)
    sp.add_argument("--network", action="store_true")

    sp = sub.add_parser("order", help="vanishing order at s = 0")
    common(sp, precision=False)

    sp = sub.add_parser("verify-sv", help="verify the special-value identity")
    common(sp, oracle=True)
    sp.add_argument("--tolerance", type=float, default=1e-8)
    sp.add_argument("--mode", choices=("nf", "ff"), default="nf")
    sp.add_argument("--curve-q", type=int, default=2)
    sp.add_argument("--network", action="store_true")
    return p


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    warnings.simplefilter("once", WildReductionWarning)
    try:
        return _dispatch(args)
    except USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        inputs=[args.input] if getattr(args, "input", None) else [],
        mode=getattr(args, "mode", "nf"),
        truncate=getattr(args, "truncate", 10000),
        precision=getattr(args, "precision", 50),
        tolerance=getattr(args, "tolerance", 1e-8),
        oracle_path=getattr(args, "oracle", None),
        network=getattr(args, "network", False),
    )


def _dispatch(args) -> int:
    _config_from_args(args)  # validates bounds, precision and mode
    cmd = args.subcommand
    if cmd == "validate":
        doc = _load_document(args.input)
        notes = doc.data.validate()
        flags = good_reduction_locus(doc.data) if isinstance(doc.data, CTorusData) else {}
        print(f"OK {doc.data.kind} document: generic rank "
              f"{(doc.data.characters if isinstance(doc.data, CTorusData) else doc.data.generic).rank}, "
              f"{len(doc.data.bad_places)} listed place(s)")
        for label, good in sorted(flags.items()):
            print(f"  place {label}: {'good' if good else 'bad'}")
        for n in notes:
            print(f"  note: {n}")
        return 0

    if cmd == "dualize":
        doc = _load_document(args.input)
        dual = dualize_sheaf(doc.data) if isinstance(doc.data, TfSheafData) \
            else dualize_torus(doc.data)
        text = ctdata.serialize_ctdata(dual, doc.fields)
        if args.output:
            Path(args.output).write_text(text)
            print(f"wrote {args.output}")
        else:
            print(text, end="")
        return 0

    if cmd == "bidual-check":
        if args.random:
            from .instances import random_tf_sheaf_data
            rng = random.Random(args.seed)
            bad = 0
            for k in range(args.random):
                F = random_tf_sheaf_data(rng)
                rep = check_bidual(F)
                print(f"instance {k}: {'pass' if rep.ok else 'FAIL ' + repr(rep.mismatches)}")
                bad += 0 if rep.ok else 1
            return 0 if bad == 0 else 1
        if not args.input:
            raise ValidationError("bidual-check needs --input or --random N")
        doc = _load_document(args.input)
        rep = check_bidual(doc.data)
        print("pass" if rep.ok else f"FAIL {rep.mismatches}")
        return 0 if rep.ok else 1

    if cmd == "lfactor":
        doc = _load_document(args.input)
        oracle = _load_oracle(args.oracle, doc.data.group) if args.oracle else None
        ctx = _place_ctx(args, doc, oracle)
        factor = local_factor_torus(doc.data, ctx, oracle)
        if isinstance(factor, SymbolicFactorProduct):
            print(f"non-polynomial local factor: {factor!r}")
        else:
            print(str(factor))
        return 0

    if cmd == "lseries":
        doc = _load_document(args.input)
        if args.mode == "ff":
            curve = FFCurveData(args.curve_q)
            res = ff_l_function(k0_decompose(doc.data), curve, args.cutoff)
            for i, c in enumerate(res.series):
                print(f"T^{i}: {c}")
            if res.rational_fit is not None:
                print(f"rational fit: {res.rational_fit}")
            else:
                print("rational fit: none at this cutoff")
            return 0
        if not args.oracle:
            raise ValidationError("number-field lseries needs --oracle")
        oracle = _load_oracle(args.oracle, doc.data.group)
        res = euler_product(doc.data, oracle, s=args.s, bound=args.truncate,
                            dps=args.precision)
        with mp.workdps(args.precision):
            print(f"L({args.s}) ~ {mp.nstr(res.value, args.precision)}")
            print(f"tail bound {mp.nstr(res.tail_bound, 5)} over {res.places_used} places")
        return 0

    if cmd == "conductor":
        doc = _load_document(args.input)
        data = doc.data
        Y = data.characters if isinstance(data, CTorusData) else data.generic
        places = [e.place for e in data.bad_places]
        per_place, total = base_change_conductor(Y, places, dps=args.precision)
        for label in sorted(per_place):
            print(f"c_{label} = {per_place[label]}")
        with mp.workdps(args.precision):
            print(f"total = {mp.nstr(total, 20)}")
        return 0

    if cmd == "decompose":
        doc = _load_document(args.input)
        K = k0_decompose(_as_torus(doc.data))
        for key, c in K.field_terms.items():
            label = doc.fields.get(key, f"subgroup {list(key)}")
            print(f"field {label}: {c}")
        for pt in K.point_terms:
            print(f"point at {pt.lower_label} (q={pt.q}, rank={pt.module.free_rank}): {pt.coeff}")
        if K.is_zero():
            print("zero class")
        return 0

    if cmd == "order":
        doc = _load_document(args.input)
        K = k0_decompose(_as_torus(doc.data))
        print(vanishing_order(K))
        return 0

    if cmd == "chi":
        doc = _load_document(args.input)
        K = k0_decompose(_as_torus(doc.data))
        if args.mode == "ff":
            value = chi_of(K, None, args.precision, mode="ff", curve=FFCurveData(args.curve_q))
        else:
            records = _field_records(doc, K, args.network)
            value = chi_of(K, records, args.precision)
        with mp.workdps(args.precision):
            print(mp.nstr(value, min(args.precision, 30)))
        return 0

    if cmd == "verify-sv":
        doc = _load_document(args.input)
        T = _as_torus(doc.data)
        if args.oracle:
            oracle = _load_oracle(args.oracle, doc.data.group)
            _check_oracle_consistency(T, oracle)
        K = k0_decompose(T)
        if args.mode == "ff":
            report = verify_special_value(K, mode="ff", curve=FFCurveData(args.curve_q),
                                          tolerance=args.tolerance, dps=args.precision)
        else:
            records = _field_records(doc, K, args.network)
            report = verify_special_value(K, records, tolerance=args.tolerance,
                                          dps=args.precision)
        if getattr(args, "json", False):
            print(json.dumps({
                "order": report.order,
                "leading_abs": mp.nstr(report.leading, 17),
                "chi": mp.nstr(report.chi, 17),
                "relative_error": mp.nstr(report.relative_error, 5),
                "route": report.route,
                "verdict": report.verdict,
            }))
        else:
            for line in report.lines():
                print(line)
        return 0 if report.passed() else 1

    raise ValidationError(f"unknown subcommand {cmd!r}")


def _as_torus(data) -> CTorusData:
    return data if isinstance(data, CTorusData) else dualize_sheaf(data)


def _check_oracle_consistency(T: CTorusData, oracle):
    overrides = getattr(oracle, "overrides", {})
    for entry in T.bad_places:
        try:
            p = int(entry.place.label)
        except ValueError:
            continue
        if p in overrides and overrides[p] != entry.place:
            raise ValidationError(
                f"listed place {entry.place.label} disagrees with the oracle override")


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
