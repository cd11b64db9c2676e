"""
Report Writer Module
JSON and Markdown exports of verification reports and enumeration runs.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd
from jinja2 import Template

from catalog.enumerator import EnumerationResult
from verify.engine import ARITHMETIC, VerificationReport

logger = logging.getLogger(__name__)

SUMMARY_TEMPLATE = Template("""# Verification summary

White vertices in the chart: {{ w_total }}.
Rules loaded: {{ rules | length }}.

{{ table }}

{% for v in verdicts -%}
## {{ v.candidate }}

- verdict: {{ v.verdict }}{% if v.incomplete %} (claimed exclusion, rulebase incomplete){% endif %}
- branches: {{ v.branches | length }}{% if v.open %}, {{ v.open }} open{% endif %}
{%- if v.argument %}
- argument: {{ v.argument }}
{%- endif %}
{%- if v.lemma %}
- lemma: {{ v.lemma }}
{%- endif %}
{%- if v.sums %}
- sums: {{ v.sums | join('; ') }}
{%- endif %}
{%- if v.rules %}
- rules: {{ v.rules | join(', ') }}
{%- endif %}
{% for b in v.shown %}
    {{ b.key }}: {{ b.status }}{% if b.closed_by %} by {{ b.closed_by }}{% endif %}
    {%- for s in b.steps %}
      - {{ s.rule }}: {{ s.detail }}
    {%- endfor %}
{% endfor %}
{% endfor %}""")


def verdict_table(report: VerificationReport) -> pd.DataFrame:
    rows = []
    for v in report.verdicts:
        closed = [b for b in v.branches if b.status != 'open']
        rows.append({
            'candidate': v.candidate,
            'verdict': v.verdict,
            'whites': v.whites,
            'branches': len(v.branches),
            'arithmetic': sum(1 for b in closed if b.closed_by == ARITHMETIC),
            'trusted': sum(1 for b in closed if b.closed_by != ARITHMETIC),
            'open': len(v.open_branches),
        })
    return pd.DataFrame(rows, columns=['candidate', 'verdict', 'whites', 'branches',
                                       'arithmetic', 'trusted', 'open'])


class Reporter:
    """Writes verification and enumeration results to the output directory."""

    def __init__(self, config: Dict[str, Any]):
        self.config = config
        self.max_branches_shown = config.get('report', {}).get('max_branches_shown', 12)

    def verification_dict(self, report: VerificationReport) -> Dict[str, Any]:
        return report.to_dict()

    def export_json(self, report: VerificationReport, output_file: Path) -> None:
        with open(output_file, 'w') as f:
            json.dump(self.verification_dict(report), f, indent=2)
        logger.info("verification report saved to %s", output_file)

    def summary_markdown(self, report: VerificationReport) -> str:
        """Proof forest summary: a verdict table, then one section per candidate."""
        verdicts = []
        for v in report.verdicts:
            # open branches first so a short listing still shows what failed
            ordered = v.open_branches + [b for b in v.branches if b.status != 'open']
            verdicts.append({
                'candidate': v.candidate,
                'verdict': v.verdict,
                'incomplete': v.incomplete,
                'argument': v.argument,
                'lemma': v.lemma,
                'branches': v.branches,
                'open': len(v.open_branches),
                'sums': v.sums(),
                'rules': [f"{r} ({report.citations[r]})" if r in report.citations else r
                          for r in v.rules_used()],
                'shown': ordered[:self.max_branches_shown],
            })
        return SUMMARY_TEMPLATE.render(
            w_total=report.w_total,
            rules=report.rules,
            table=verdict_table(report).to_markdown(index=False),
            verdicts=verdicts,
        )

    def export_markdown(self, report: VerificationReport, output_file: Path) -> None:
        with open(output_file, 'w') as f:
            f.write(self.summary_markdown(report))
        logger.info("verification summary saved to %s", output_file)

    # -- enumeration --------------------------------------------------------

    def enumeration_dict(self, result: EnumerationResult, emit_rejected: bool = False) -> Dict[str, Any]:
        data = {
            'schema': 1,
            'w': result.w,
            'filters': result.filters,
            'classes': [c.canonical_form for c in result.classes],
            'kill_counts': result.kill_counts(),
            'citations': result.citations,
        }
        if emit_rejected:
            rejected = result.rejected
            data['rejected'] = rejected[['canonical_form', 'rejected_by']].to_dict(orient='records')
        return data

    def enumeration_markdown(self, result: EnumerationResult, names: Optional[Dict[str, str]] = None) -> str:
        """Provenance table of an enumeration run, one row per candidate class."""
        table = result.provenance.copy()
        table['rejected_by'] = table['rejected_by'].fillna('-')
        if names:
            table['catalog'] = table['canonical_form'].map(names).fillna('-')
        lines = [
            f"# Enumeration w={result.w}",
            '',
            f"Filters: {', '.join(result.filters) or 'none'}",
            *(f"- {name}: {cite}" for name, cite in result.citations.items()),
            f"Survivors: {len(result.classes)} of {len(table)}",
            '',
            table.to_markdown(index=False) if len(table) else '_no candidate classes_',
            '',
        ]
        return '\n'.join(lines)
