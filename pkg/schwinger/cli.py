"""
Command-line interface: python -m schwinger <command> M [options].

Results go to standard output as JSON, CSV or an aligned table; logs go to
standard error. Exit status is 0 on success, 1 when a check fails and 2 for
invalid input.
"""
from itertools import product
from typing import List, Optional, Sequence, Tuple
import argparse
import csv
import json
import logging
import random
import sys

from schwinger.config import load_settings
from schwinger.numtheory import (
    enumerate_bifactorizations,
    factorize,
    root_to_bifactorization,
    unit_square_roots,
)
from schwinger.representations import (
    KINDS,
    SPLIT_KINDS,
    build_basis,
    display_label,
    localization_demo,
    parse_split,
)
from schwinger.states import overlap
from schwinger.verify import CHECK_IDS, FAIL, report_to_dict, root_products_report, run_suite

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID = 0, 1, 2


def _split_arg(value: str) -> List[int]:
    try:
        parts = [int(v) for v in value.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Split must look like M1,M2, got {value!r}.")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("Split must name exactly two factors.")
    return parts


def _emit(payload, headers: Sequence[str], rows: List[Sequence], fmt: str) -> None:
    if fmt == 'json':
        print(json.dumps(payload, indent=2))
    elif fmt == 'csv':
        writer = csv.writer(sys.stdout, lineterminator='\n')
        writer.writerow(headers)
        writer.writerows(rows)
    else:
        cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
        for row in cells:
            print('  '.join(c.rjust(w) for c, w in zip(row, widths)).rstrip())


def _display(label, scheme, one_based: bool) -> Tuple[int, ...]:
    return tuple(display_label(v, m, one_based) for v, m in zip(label, scheme))


def _label_text(label, scheme, one_based: bool) -> str:
    return ','.join(map(str, _display(label, scheme, one_based)))


def _signs_text(signs) -> str:
    return ''.join('+' if s == 1 else '-' if s == -1 else '?' for s in signs)


def cmd_factor(args) -> int:
    f = factorize(args.M)
    rows = [(c.p, c.n, c.m, c.L, c.N) for c in f.constituents]
    payload = {
        'M': f.M,
        'constituents': [dict(zip(('p', 'n', 'm', 'L', 'N'), row)) for row in rows],
    }
    if not rows:
        payload['note'] = f"M = {f.M} has no prime-power constituents."
    _emit(payload, ('p', 'n', 'm', 'L', 'N'), rows, args.format)
    if not rows and args.format != 'json':
        print(f"note: {payload['note']}", file=sys.stderr)
    return EXIT_OK


def cmd_roots(args) -> int:
    f = factorize(args.M)
    entries = []
    for r in unit_square_roots(args.M, f):
        split = None
        if r.is_sign_root:
            bi = root_to_bifactorization(r, f)
            split = [bi.M1, bi.M2]
        entries.append({
            'a': r.a,
            'residues': list(r.sign_pattern),
            'signs': _signs_text(r.signs),
            'sign_root': r.is_sign_root,
            'split': split,
        })
    rows = [(e['a'], e['signs'], 'sign' if e['sign_root'] else 'exotic',
             '*'.join(map(str, e['split'])) if e['split'] else '-') for e in entries]
    _emit({'M': args.M, 'moduli': list(f.moduli), 'roots': entries},
          ('a', 'signs', 'kind', 'split'), rows, args.format)
    return EXIT_OK


def cmd_splits(args) -> int:
    splits = enumerate_bifactorizations(factorize(args.M))
    headers = ('M1', 'M2', 'L1', 'L2', 'N1', 'N2')
    rows = [(bi.M1, bi.M2, bi.L1, bi.L2, bi.N1, bi.N2) for bi in splits]
    _emit({'M': args.M, 'splits': [dict(zip(headers, row)) for row in rows]},
          headers, rows, args.format)
    return EXIT_OK


def cmd_basis(args) -> int:
    basis = build_basis(args.M, args.type, args.split)
    one_based = not args.zero_based
    payload = basis.to_dict(one_based=one_based, limit=args.settings.max_dense)
    rows = []
    for entry in payload['states']:
        rows.append((
            ','.join(map(str, entry['label'])),
            ' '.join(f"{x}:{e}/{args.M}" for x, e in zip(entry['support'], entry['phase_exponents'])),
        ))
    _emit(payload, ('label', 'terms'), rows, args.format)
    return EXIT_OK


def _overlap_pairs(args, left, right) -> List:
    sample = args.sample
    if sample is None and args.M * args.M <= args.settings.max_pairs:
        return list(product(list(left.labels()), list(right.labels())))
    sample = sample or args.settings.sample_pairs
    rng = random.Random(args.seed)
    return [
        (tuple(rng.randrange(m) for m in left.scheme), tuple(rng.randrange(m) for m in right.scheme))
        for _ in range(sample)
    ]


def cmd_overlap(args) -> int:
    left = build_basis(args.M, args.left, args.split)
    right = build_basis(args.M, args.right, args.split)
    one_based = not args.zero_based
    entries = []
    pairs = _overlap_pairs(args, left, right)
    pairs.sort(key=lambda ab: (_display(ab[0], left.scheme, one_based),
                               _display(ab[1], right.scheme, one_based)))
    for a, b in pairs:
        ov = overlap(left.state(a), right.state(b))
        entries.append({
            'left': _label_text(a, left.scheme, one_based),
            'right': _label_text(b, right.scheme, one_based),
            'magnitude_squared': str(ov.magnitude_squared) if ov.exact else f"{abs(ov.value) ** 2:.12g}",
            'magnitude': round(ov.magnitude, 12),
            'phase': ov.exponent.label if ov.exponent is not None else '-',
            'exact': ov.exact,
        })
    headers = ('left', 'right', 'magnitude_squared', 'magnitude', 'phase')
    rows = [tuple(e[h] for h in headers) for e in entries]
    _emit({'M': args.M, 'left': args.left, 'right': args.right, 'overlaps': entries},
          headers, rows, args.format)
    return EXIT_OK


def cmd_check(args) -> int:
    selection = [c.strip() for c in args.checks.split(',')] if args.checks else None
    results = run_suite(args.M, selection, settings=args.settings, jobs=args.jobs)
    report = report_to_dict(args.M, results)
    rows = [(r.check_id, r.status, r.reason or '', json.dumps(r.witness) if r.witness else '')
            for r in results]
    _emit(report, ('check', 'status', 'reason', 'witness'), rows, args.format)
    return EXIT_CHECK_FAILED if any(r.status == FAIL for r in results) else EXIT_OK


def cmd_products(args) -> int:
    entries = root_products_report(args.M)
    rows = [
        (e['a'], f"{e['a_minus_1']}={e['cofactor_minus']}*{e['gcd_minus']}",
         f"{e['a_plus_1']}={e['cofactor_plus']}*{e['gcd_plus']}",
         e['product_mod_M'], '*'.join(map(str, e['split'])),
         'yes' if e['representative'] else '')
        for e in entries
    ]
    _emit({'M': args.M, 'products': entries},
          ('a', 'a-1', 'a+1', 'product mod M', 'split', 'representative'), rows, args.format)
    return EXIT_OK


def cmd_localize(args) -> int:
    bi = parse_split(args.M, args.split)
    q1 = args.q1
    if q1 is None:
        q1 = 0
    elif not args.zero_based and not 1 <= q1 <= bi.M1:
        raise ValueError(f"q1 must lie in [1, {bi.M1}].")
    elif args.zero_based and not 0 <= q1 < bi.M1:
        raise ValueError(f"q1 must lie in [0, {bi.M1}).")
    report = localization_demo(bi, q1)
    payload = report.to_dict(one_based=not args.zero_based)
    rows = [('q1q2', r['label'], r['magnitude_squared'], r['phase']) for r in payload['position_side']]
    rows += [('k1k2', r['label'], r['magnitude_squared'], r['phase']) for r in payload['momentum_side']]
    rows = [(side, ','.join(map(str, label)), mag, phase or '-') for side, label, mag, phase in rows]
    _emit(payload, ('basis', 'label', 'magnitude_squared', 'phase'), rows, args.format)
    return EXIT_OK if report.exact_delta_structure else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('M', type=int, help='dimension')
    common.add_argument('--format', choices=('json', 'csv', 'table'), default=None,
                        help='output format (default: json for check, table otherwise)')
    common.add_argument('--zero-based', action='store_true',
                        help='print labels as residues 0..m-1 instead of 1..m')
    common.add_argument('--max-dense', type=int, default=None,
                        help='largest M for dense oracles (overrides SCHWINGER_MAX_DENSE)')
    common.add_argument('--log-level', default=None,
                        help='logging level (overrides SCHWINGER_LOG_LEVEL)')

    parser = argparse.ArgumentParser(prog='schwinger',
                                     description='Factorization-reflecting finite representations.')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('factor', parents=[common], help='prime-power constituents with L and N')
    sub.add_parser('roots', parents=[common], help='roots of x^2 = 1 mod M')
    sub.add_parser('splits', parents=[common], help='coprime bi-factorizations')
    sub.add_parser('products', parents=[common], help='how (a-1)(a+1) splits M for each root')

    basis = sub.add_parser('basis', parents=[common], help='print a labeled basis')
    basis.add_argument('--type', choices=KINDS, required=True)
    basis.add_argument('--split', type=_split_arg)

    ov = sub.add_parser('overlap', parents=[common], help='overlap table between two bases')
    ov.add_argument('--left', choices=KINDS, required=True)
    ov.add_argument('--right', choices=KINDS, required=True)
    ov.add_argument('--split', type=_split_arg)
    ov.add_argument('--sample', type=int, default=None, help='number of random label pairs')
    ov.add_argument('--seed', type=int, default=0)

    check = sub.add_parser('check', parents=[common], help='run the verification suite')
    check.add_argument('--checks', default=None,
                       help=f"comma-separated subset of: {', '.join(CHECK_IDS)}")
    check.add_argument('--jobs', type=int, default=1)

    loc = sub.add_parser('localize', parents=[common], help='localized state in q1q2 and k1k2')
    loc.add_argument('--split', type=_split_arg, required=True)
    loc.add_argument('--q1', type=int, default=None)
    return parser


COMMANDS = {
    'factor': cmd_factor,
    'roots': cmd_roots,
    'splits': cmd_splits,
    'basis': cmd_basis,
    'overlap': cmd_overlap,
    'check': cmd_check,
    'products': cmd_products,
    'localize': cmd_localize,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = 'json' if args.command == 'check' else 'table'
    try:
        args.settings = load_settings(max_dense=args.max_dense, log_level=args.log_level)
        logging.basicConfig(stream=sys.stderr, level=args.settings.log_level.upper(),
                            format='%(levelname)s %(name)s: %(message)s', force=True)
        if args.command in ('basis', 'overlap') and args.split is None and (
                getattr(args, 'type', None) in SPLIT_KINDS
                or getattr(args, 'left', None) in SPLIT_KINDS
                or getattr(args, 'right', None) in SPLIT_KINDS):
            raise ValueError("A split M1,M2 is required for this basis type.")
        return COMMANDS[args.command](args)
    except ValueError as e:
        logger.debug(f"Rejected input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
