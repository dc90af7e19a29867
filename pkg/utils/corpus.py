"""
Bundled model corpus.

Maps each model under models/ to its expected verdict and, for seeded-bug
mutants, the safe model it was derived from.
"""

import os
from typing import Dict, List, Optional

MODELS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'models')

CORPUS: Dict[str, Dict] = {
    'dekker': {'file': 'dekker.fcub', 'expected': 'SAFE', 'parent': None},
    'mux_sem': {'file': 'mux_sem.fcub', 'expected': 'SAFE', 'parent': None},
    # german-ish variants are reconstructions, see models/README.md
    'german_ish': {'file': 'german_ish.fcub', 'expected': 'SAFE', 'parent': None},
    'german_ish2': {'file': 'german_ish2.fcub', 'expected': 'SAFE', 'parent': None},
    'broken_dekker': {'file': 'broken_dekker.fcub', 'expected': 'UNSAFE', 'parent': 'dekker'},
    'broken_mux_sem': {'file': 'broken_mux_sem.fcub', 'expected': 'UNSAFE', 'parent': 'mux_sem'},
    'broken_german_ish': {'file': 'broken_german_ish.fcub', 'expected': 'UNSAFE', 'parent': 'german_ish'},
    'broken_german_ish2': {'file': 'broken_german_ish2.fcub', 'expected': 'UNSAFE', 'parent': 'german_ish2'},
}


def get_models() -> List[str]:
    return list(CORPUS.keys())


def get_safe_models() -> List[str]:
    return [name for name, conf in CORPUS.items() if conf['parent'] is None]


def mutants_of(name: str) -> List[str]:
    return [other for other, conf in CORPUS.items() if conf['parent'] == name]


def expected_verdict(name: str) -> Optional[str]:
    conf = CORPUS.get(name)
    return conf['expected'] if conf else None


def model_path(name: str) -> str:
    if name not in CORPUS:
        raise KeyError(f"'{name}' is not in the bundled corpus")
    return os.path.join(MODELS_DIR, CORPUS[name]['file'])
