#!/usr/bin/env python3
"""
Settings - configuration loading for the evaluator.

config.yaml is merged over the built-in defaults, so a partial file only
needs the keys it changes. A missing or unreadable file is not fatal: the
defaults are used and a warning is logged.
"""

import copy
import logging
import os
from pathlib import Path
from typing import Dict, Optional

import yaml

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "ROC_EVAL_OUTPUT_DIR"
DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config.yaml"


def get_default_config() -> Dict:
    """Return the built-in configuration"""
    return {
        'output': {
            'results_directory': './results',
            'report_file': 'report.json',
            'roc_plot': 'roc.svg',
            'classification_plot': 'classification.svg',
            'comparison_plot': 'comparison.svg',
            'cost_plot': 'cost.svg',
            'study_report': 'study_report.json',
            'model_records': 'models.csv',
            'pair_records': 'pairs.csv',
        },
        'markers': {
            'thresholds': [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        },
        'imbalance': {
            'extreme_low': 0.1,
            'extreme_high': 0.9,
        },
        'scorer': {
            'max_iterations': 100,
            'tolerance': 1e-8,
            'separation_bound': 20.0,
            'ridge': 0.0,
        },
        'study': {
            'combination_size': 3,
            'auc_gap_thresholds': [0.2],
            'workers': 1,
            'label_column': 'label',
        },
        'plot': {
            'width': 480,
            'height': 480,
            'margin': 48,
            'palette': {
                'curve': '#1f4e9c',
                'highlight': '#d62728',
                'random': '#2ca02c',
                'tpr': '#1f4e9c',
                'fpr': '#ff7f0e',
                'violation': '#d62728',
                'acceptable': '#9467bd',
                'axis': '#333333',
                'grid': '#dddddd',
            },
        },
    }


def _deep_merge(base: Dict, override: Dict) -> Dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = None) -> Dict:
    """Load configuration from a YAML file, falling back to the defaults"""
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    defaults = get_default_config()
    try:
        with open(path, 'r', encoding='utf-8') as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise ValueError("top level must be a mapping")
    except (OSError, ValueError, yaml.YAMLError) as e:
        logger.warning("Could not load config file %s: %s; using defaults", path, e)
        return defaults
    return _deep_merge(defaults, loaded)


def resolve_output_dir(config: Dict, override: Optional[str] = None) -> Path:
    """--output-dir beats ROC_EVAL_OUTPUT_DIR beats config.yaml"""
    if override:
        return Path(override)
    from_env = os.environ.get(OUTPUT_DIR_ENV)
    if from_env:
        return Path(from_env)
    return Path(config['output']['results_directory'])
