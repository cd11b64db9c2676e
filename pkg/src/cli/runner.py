"""
Command Line Module
Subcommands for charts, move templates, the catalog and the verification pipeline.
"""

import argparse
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from catalog.enumerator import Enumerator
from catalog.library import catalog_from_config
from catalog.matcher import contains_template
from chart.analysis import chart_type, complexity
from chart.model import WHITE, Chart
from chart.textio import load_chart, render_text, save_chart
from chart.validator import check_assumptions, validate
from common.config import configure_logging, load_config, output_directory, resolve_seed
from common.errors import ChartForgeError
from features.strands import all_strands, middle_darts, strand_components, strands
from moves.engine import apply, search_reductions
from moves.matcher import find_sites
from moves.template import template_library
from regions.disks import complementary_disks, disk_facts
from regions.lenses import find_lenses
from report.reporter import Reporter, verdict_table
from report.svg import SvgRenderer
from verify.engine import Verifier

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

BANNER = '=' * 60


def _emit(args: argparse.Namespace, data: Dict[str, Any], text: Callable[[], str]) -> None:
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print(text())


def _load_chart(args: argparse.Namespace, config: Dict[str, Any]) -> Chart:
    return load_chart(args.chart, config.get('chart', {}).get('default_degree'))


def _labels(chart: Chart, label: Optional[int]) -> List[int]:
    return [label] if label is not None else list(range(1, chart.degree_n))


# -- chart commands -------------------------------------------------------------


def cmd_validate(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    chart = _load_chart(args, config)
    report = validate(chart)
    violations = list(report.violations)
    if args.assumptions and report.ok:
        violations += check_assumptions(chart).violations
    data = {'schema': 1, 'chart': args.chart, 'ok': not violations,
            'violations': [asdict(v) for v in violations]}

    def text() -> str:
        if not violations:
            return f"{args.chart}: valid"
        lines = [f"{args.chart}: {len(violations)} violations"]
        lines += [f"  {v.rule} at {v.location}: {v.message}" for v in violations]
        return '\n'.join(lines)

    _emit(args, data, text)
    return EXIT_OK if not violations else EXIT_FAILURE


def cmd_info(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    chart = _load_chart(args, config)
    kinds: Dict[str, int] = {}
    for vertex in chart.vertices.values():
        kinds[vertex.kind] = kinds.get(vertex.kind, 0) + 1
    w, minus_f = complexity(chart)
    found_type = chart_type(chart)
    data = {
        'schema': 1,
        'degree': chart.degree_n,
        'vertices': kinds,
        'edges': len(chart.real_edges()),
        'faces': len(chart.face_list),
        'components': len(chart.components),
        'complexity': [w, minus_f],
        'type': None if found_type is None else {'m': found_type[0], 'counts': found_type[1]},
        'infinity_face': chart.infinity_face.key,
    }

    def text() -> str:
        type_text = '-' if found_type is None else f"({found_type[0]}; {', '.join(map(str, found_type[1]))})"
        return '\n'.join([
            f"degree:      {chart.degree_n}",
            f"vertices:    {', '.join(f'{k}={v}' for k, v in sorted(kinds.items()))}",
            f"edges:       {data['edges']}",
            f"faces:       {data['faces']}",
            f"components:  {data['components']}",
            f"complexity:  (w={w}, -f={minus_f})",
            f"type:        {type_text}",
        ])

    _emit(args, data, text)
    return EXIT_OK


def cmd_features(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    chart = _load_chart(args, config)
    found = all_strands(chart) if args.label is None else strands(chart, args.label)
    whites = chart.vertices_of_kind(WHITE)
    data = {
        'schema': 1,
        'strands': [{'id': s.id, 'label': s.label, 'class': s.strand_class, 'edges': list(s.edges),
                     'endpoints': list(s.endpoints), 'crossings': list(s.crossings)} for s in found],
        'middles': {w: middle_darts(chart, w) for w in whites},
    }

    def text() -> str:
        lines = [f"{'strand':<10}{'label':<7}{'class':<10}edges"]
        lines += [f"{s.id:<10}{s.label:<7}{s.strand_class:<10}{','.join(s.edges)}" for s in found]
        lines += [f"middle darts at {w}: {', '.join(d)}" for w, d in data['middles'].items()]
        return '\n'.join(lines)

    _emit(args, data, text)
    return EXIT_OK


def cmd_disks(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    chart = _load_chart(args, config)
    rows = []
    for m in _labels(chart, args.label):
        strand_list = strands(chart, m)
        for component in strand_components(chart, m, strand_list):
            if not component.whites:
                continue
            for disk in complementary_disks(chart, component, strand_list):
                facts = disk_facts(chart, disk, strand_list)
                record = asdict(facts)
                record.update({'label': m, 'boundary_whites': list(disk.boundary_whites)})
                rows.append(record)

    def text() -> str:
        lines = [f"{'disk':<24}{'m':<3}{'k':<3}{'feelers':<9}{'directed':<10}interior"]
        for r in rows:
            lines.append(f"{r['disk_id']:<24}{r['label']:<3}{r['angled_k']:<3}{r['feelers']:<9}"
                         f"{str(r['directed']):<10}{r['interior_whites']}")
        return '\n'.join(lines)

    _emit(args, {'schema': 1, 'disks': rows}, text)
    return EXIT_OK


def cmd_lenses(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    chart = _load_chart(args, config)
    found = []
    for m in _labels(chart, args.label):
        for lens in find_lenses(chart, m):
            found.append({'label': m, 'disk': lens.disk.id, 'e1': lens.e1.id, 'e2': lens.e2.id,
                          'whites': [lens.w1, lens.w2], 'kind': lens.kind, 'side': lens.side})

    def text() -> str:
        if not found:
            return 'no lenses'
        return '\n'.join(f"({f['label']}, {f['label'] + 1}) lens {f['e1']}/{f['e2']} at "
                         f"{f['whites'][0]},{f['whites'][1]} [{f['kind']}]" for f in found)

    _emit(args, {'schema': 1, 'lenses': found}, text)
    return EXIT_OK


# -- moves ----------------------------------------------------------------------


def cmd_moves(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    library = template_library(config)
    if args.action == 'list':
        if args.chart is None:
            data = {'schema': 1, 'templates': [{'key': t.key, 'family': t.family, 'inverse': t.inverse,
                                                'effect': t.effect.as_dict()} for t in library.values()]}
            _emit(args, data, lambda: '\n'.join(f"{t['key']:<24}{t['family']:<8}{t['effect']}"
                                                for t in data['templates']))
            return EXIT_OK
        chart = _load_chart(args, config)
        sites = [s for key in sorted(library) if args.template in (None, key)
                 for s in find_sites(chart, library[key])]
        data = {'schema': 1, 'sites': [s.describe() for s in sites]}
        _emit(args, data, lambda: '\n'.join(f"[{i}] {d}" for i, d in enumerate(data['sites'])) or 'no sites')
        return EXIT_OK

    if args.action == 'search':
        if args.chart is None:
            raise ChartForgeError("moves search needs a chart")
        chart = _load_chart(args, config)
        settings = config.get('moves', {})
        bound = args.bound if args.bound is not None else settings.get('search_bound', 2)
        result = search_reductions(chart, library.values(), bound, settings.get('max_states', 5000))
        data = {'schema': 1, 'found': result.found, 'steps': result.steps, 'states': result.states}
        _emit(args, data, lambda: (f"reduction found: {' -> '.join(result.steps)}" if result.found
                                   else f"no reduction within {bound} moves ({result.states} charts)"))
        return EXIT_OK

    # apply
    if args.chart is None or args.template is None:
        raise ChartForgeError("moves apply needs a chart and --template")
    if args.template not in library:
        raise ChartForgeError(f"unknown move template '{args.template}'")
    chart = _load_chart(args, config)
    sites = find_sites(chart, library[args.template])
    if not 0 <= args.site < len(sites):
        raise ChartForgeError(f"{args.template} has {len(sites)} sites, no site {args.site}")
    result = apply(chart, sites[args.site])
    if args.output:
        save_chart(result, args.output)
        logger.info("saved %s", args.output)
    if args.json:
        print(json.dumps({'schema': 1, 'site': sites[args.site].describe(), 'chart': render_text(result)}, indent=2))
    elif not args.output:
        print(render_text(result), end='')
    return EXIT_OK


# -- catalog --------------------------------------------------------------------


def cmd_match(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    chart = _load_chart(args, config)
    entry = catalog_from_config(config).entry(args.entry)
    mapping = contains_template(chart, entry, args.label, ro=args.ro)
    data = {'schema': 1, 'entry': args.entry, 'found': mapping is not None, 'mapping': mapping}
    _emit(args, data, lambda: (f"{args.entry}: " + (', '.join(f"{k}->{v}" for k, v in sorted(mapping.items()))
                                                     if mapping is not None else 'not found')))
    return EXIT_OK if mapping is not None else EXIT_FAILURE


def cmd_enumerate(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    enumerator = Enumerator(config)
    filters = args.filters.split(',') if args.filters else None
    result = enumerator.enumerate_components(args.w, args.preset, filters)
    reporter = Reporter(config)
    catalog = catalog_from_config(config)
    names = {c.canonical_form: catalog.identify(c) for c in result.classes}
    names = {k: v for k, v in names.items() if v}
    if args.markdown:
        Path(args.markdown).write_text(reporter.enumeration_markdown(result, names), encoding='utf-8')

    data = reporter.enumeration_dict(result, args.emit_rejected)
    data['names'] = names

    def text() -> str:
        lines = [BANNER, f"ENUMERATION w={result.w}", BANNER,
                 f"filters: {', '.join(result.filters) or 'none'}",
                 f"classes: {len(result.classes)}"]
        for c in result.classes:
            lines.append(f"  {names.get(c.canonical_form, '-'):<20}{c.canonical_form}")
        lines.append('rejections: ' + ', '.join(f"{k}={v}" for k, v in result.kill_counts().items()))
        if args.emit_rejected:
            for row in data['rejected']:
                lines.append(f"  rejected by {row['rejected_by']}: {row['canonical_form']}")
        return '\n'.join(lines)

    _emit(args, data, text)
    if args.expect_count is not None and len(result.classes) != args.expect_count:
        logger.error("expected %d classes, found %d", args.expect_count, len(result.classes))
        return EXIT_FAILURE
    return EXIT_OK


def cmd_orientations(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    verifier = Verifier(config)
    census = verifier.enumerate_orientations(verifier.catalog.entry(args.candidate))
    data = {
        'schema': 1, 'candidate': census.candidate, 'raw': census.raw, 'pruned': census.pruned,
        'classes': [{'name': c.name, 'canonical_form': c.canonical_form, 'size': c.size,
                     'placements': c.placements} for c in census.classes],
    }

    def text() -> str:
        lines = [f"{census.candidate}: {census.raw} orientations, {census.pruned} pruned, "
                 f"{len(census.classes)} classes"]
        for c in census.classes:
            where = ', '.join(f"{bw}@{p}" for bw, p in sorted(c.placements.items()))
            lines.append(f"  {c.name or '-':<32}x{c.size:<4}{where}")
        return '\n'.join(lines)

    _emit(args, data, text)
    return EXIT_OK


# -- verification ---------------------------------------------------------------


def cmd_verify(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    if args.strict:
        config.setdefault('verify', {})['strict'] = True
    verifier = Verifier(config)
    rulebase = verifier.rulebase
    if args.without:
        rulebase = rulebase.without(args.without.split(','))
    reporter = Reporter(config)

    if args.candidate:
        verdict = verifier.exclude_candidate(verifier.catalog.entry(args.candidate), rulebase, args.w_total)
        _emit(args, {'schema': 1, **verdict.to_dict()},
              lambda: f"{verdict.candidate}: {verdict.verdict}, {len(verdict.branches)} branches, "
                      f"{len(verdict.open_branches)} open" + ''.join(f"\n  {s}" for s in verdict.sums()))
        return EXIT_OK

    report = verifier.theorem_pipeline(rulebase, args.w_total)
    directory = output_directory(config)
    json_path = Path(args.output) if args.output else directory / 'verification_report.json'
    reporter.export_json(report, json_path)
    if args.markdown:
        reporter.export_markdown(report, Path(args.markdown))

    def text() -> str:
        return '\n'.join([
            BANNER, f"VERIFICATION (w_total={report.w_total}, {len(report.rules)} rules)", BANNER,
            verdict_table(report).to_markdown(index=False), '',
            f"excluded:  {', '.join(report.excluded) or '-'}",
            f"survivors: {', '.join(report.survivors) or '-'}",
            f"incomplete: {', '.join(report.incomplete) or '-'}",
            f"report saved to: {json_path}",
        ])

    _emit(args, reporter.verification_dict(report), text)
    if args.expect_survivors is not None and len(report.survivors) != args.expect_survivors:
        logger.error("expected %d survivors, found %d", args.expect_survivors, len(report.survivors))
        return EXIT_FAILURE
    return EXIT_OK


def cmd_render(args: argparse.Namespace, config: Dict[str, Any]) -> int:
    if (args.chart is None) == (args.entry is None):
        raise ChartForgeError("render needs exactly one of a chart file or --entry")
    if args.layout:
        config.setdefault('render', {})['layout'] = args.layout
    seed = resolve_seed(args.seed, config.get('render', {}).get('seed', 0))
    renderer = SvgRenderer(config, seed=seed)
    if args.chart is not None:
        svg = renderer.render_chart(_load_chart(args, config))
        stem = Path(args.chart).stem
    else:
        svg = renderer.render_template(catalog_from_config(config).entry(args.entry))
        stem = args.entry
    output = Path(args.output) if args.output else output_directory(config) / f"{stem}.svg"
    output.write_text(svg, encoding='utf-8')
    data = {'schema': 1, 'output': str(output), 'fallbacks': renderer.fallbacks}
    _emit(args, data, lambda: f"SVG saved to: {output}" +
          ''.join(f"\nforce layout used: {f}" for f in renderer.fallbacks))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='chartforge', description='Chart calculus toolkit')
    parser.add_argument('--config', help='Configuration YAML file')
    parser.add_argument('--json', action='store_true', help='Print reports as JSON')
    parser.add_argument('--seed', type=int, help='Layout seed (CHARTFORGE_SEED wins)')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='Check the chart conditions')
    p.add_argument('chart')
    p.add_argument('--assumptions', action='store_true', help='Also check the minimality assumptions')
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser('info', help='Counts, complexity and type')
    p.add_argument('chart')
    p.set_defaults(handler=cmd_info)

    for name, handler, help_text in (('features', cmd_features, 'Strands and middle darts'),
                                     ('disks', cmd_disks, 'Complementary disks with their facts'),
                                     ('lenses', cmd_lenses, 'Lenses of adjacent labels')):
        p = sub.add_parser(name, help=help_text)
        p.add_argument('chart')
        p.add_argument('--label', type=int)
        p.set_defaults(handler=handler)

    p = sub.add_parser('moves', help='List, apply or search move templates')
    p.add_argument('action', choices=['list', 'apply', 'search'])
    p.add_argument('chart', nargs='?')
    p.add_argument('--template', help='Template key')
    p.add_argument('--site', type=int, default=0, help='Site index from `moves list`')
    p.add_argument('--output', help='Write the resulting chart here')
    p.add_argument('--bound', type=int, help='Search depth')
    p.set_defaults(handler=cmd_moves)

    p = sub.add_parser('match', help='Find a catalog entry as a label component')
    p.add_argument('chart')
    p.add_argument('--entry', required=True)
    p.add_argument('--label', type=int)
    p.add_argument('--ro', action='store_true', help='Accept the reversed orientation')
    p.set_defaults(handler=cmd_match)

    p = sub.add_parser('enumerate', help='Enumerate component classes')
    p.add_argument('--w', type=int, required=True)
    p.add_argument('--preset')
    p.add_argument('--filters', help='Comma separated filter names')
    p.add_argument('--expect-count', type=int)
    p.add_argument('--emit-rejected', action='store_true')
    p.add_argument('--markdown', help='Write the provenance table here')
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser('orientations', help='Orientation classes of a candidate')
    p.add_argument('candidate')
    p.set_defaults(handler=cmd_orientations)

    p = sub.add_parser('verify', help='Run the exclusion pipeline')
    p.add_argument('--candidate', help='Verify one catalog candidate only')
    p.add_argument('--expect-survivors', type=int)
    p.add_argument('--without', help='Comma separated rule ids to drop')
    p.add_argument('--w-total', type=int)
    p.add_argument('--strict', action='store_true', help='Fail when a claimed exclusion stays open')
    p.add_argument('--output', help='JSON report path')
    p.add_argument('--markdown', help='Markdown summary path')
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('render', help='Draw a chart or catalog entry as SVG')
    p.add_argument('chart', nargs='?')
    p.add_argument('--entry', help='Catalog entry to draw instead of a chart')
    p.add_argument('--layout', choices=['tutte', 'force'])
    p.add_argument('--output')
    p.set_defaults(handler=cmd_render)
    return parser


def run(argv: List[str]) -> int:
    """
    Parse arguments and dispatch a subcommand.

    Returns:
        0 on success, 1 on a domain error or failed expectation, 2 on a usage error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        config = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"error: cannot load configuration: {exc}")
        return EXIT_USAGE
    configure_logging(config, args.verbose)
    try:
        return args.handler(args, config)
    except (ChartForgeError, OSError, KeyError, ValueError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"error: {exc}")
        return EXIT_FAILURE
