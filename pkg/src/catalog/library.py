"""
Catalog Library Module
Loads the built-in graph templates and names enumerated classes.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from catalog.template import GraphTemplate, ROClass, parse_template, ro_canonical
from common.config import PROJECT_ROOT
from common.errors import DanglingReference

logger = logging.getLogger(__name__)

DEFAULT_DIRECTORY = PROJECT_ROOT / 'src' / 'catalog' / 'data'
GRAPH_SUFFIX = '.graph'

SURVIVORS = 'survivors'
CANDIDATES = 'candidates'
REFINED = 'refined'
K4_CASES = 'k4_cases'
TWIN_BIGON_CASES = 'twin_bigon_cases'
GROUPS = (SURVIVORS, CANDIDATES, REFINED, K4_CASES, TWIN_BIGON_CASES)


class Catalog:
    """Graph templates grouped by catalog directory."""

    def __init__(self, groups: Dict[str, Dict[str, GraphTemplate]]):
        self.groups = groups

    def group(self, name: str) -> List[GraphTemplate]:
        if name not in self.groups:
            raise DanglingReference(f"unknown catalog group '{name}'")
        return list(self.groups[name].values())

    def entry(self, name: str) -> GraphTemplate:
        for members in self.groups.values():
            if name in members:
                return members[name]
        raise DanglingReference(f"unknown catalog entry '{name}'")

    def names(self, group: Optional[str] = None) -> List[str]:
        if group is not None:
            return [t.name for t in self.group(group)]
        return [name for members in self.groups.values() for name in members]

    def identify(self, ro_class: ROClass, groups=(SURVIVORS, CANDIDATES)) -> Optional[str]:
        """Name of the catalog entry sharing the class's canonical form."""
        for group in groups:
            for t in self.group(group):
                if ro_canonical(t).canonical_form == ro_class.canonical_form:
                    return t.name
        return None


def load_catalog(directory: Optional[str] = None) -> Catalog:
    """
    Read every `*.graph` file, one group per subdirectory.

    Args:
        directory: Catalog root; the packaged catalog when None

    Returns:
        Catalog keyed by group, then entry name
    """
    root = Path(directory) if directory else DEFAULT_DIRECTORY
    if not root.is_absolute():
        root = PROJECT_ROOT / root
    groups: Dict[str, Dict[str, GraphTemplate]] = {}
    for folder in sorted(p for p in root.iterdir() if p.is_dir()):
        members = {}
        for path in sorted(folder.glob(f"*{GRAPH_SUFFIX}")):
            template = parse_template(path.read_text(encoding='utf-8'))
            if not template.group:
                template.group = folder.name
            members[template.name] = template
        groups[folder.name] = members
        logger.debug("catalog group %s: %d entries", folder.name, len(members))
    return Catalog(groups)


def catalog_from_config(config: Dict[str, Any]) -> Catalog:
    return load_catalog(config.get('verify', {}).get('catalog_directory'))
