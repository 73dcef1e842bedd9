#!/usr/bin/env python3
"""
Main Evaluation CLI
Threshold-aware evaluation of defect prediction models

  evaluate <scorefile>            single-model report + plots
  compare <scoreA> <scoreB>       dominance, threshold superiority, acceptable ranges, costs
  score <featurefile>             built-in logistic regression with leave-one-out scores
  study <config.yaml>             batch protocol over a model collection

Exit status: 0 success, 1 input error, 2 internal error.
"""

import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import click

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from analyzer.errors import CollinearFeaturesError, EvaluationError
from analyzer.logistic_scorer import fit_logistic, loocv_scores
from evaluator.ingest import read_features, read_scores, write_scores
from evaluator.report_builder import (
    ModelEvaluation,
    build_comparison_report,
    build_evaluation_report,
    build_scoring_report,
    evaluate_model,
    summary_lines,
    write_report,
)
from evaluator.settings import load_config, resolve_output_dir
from evaluator.study_harness import StudyConfig, run_study
from evaluator.svg_renderer import (
    render_classification_plot,
    render_comparison_plot,
    render_cost_plot,
    render_decorated_roc,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_ERROR = 2


class EvaluatorGroup(click.Group):
    """Click group that maps failures onto the documented exit codes"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                                  standalone_mode=False, **extra)
            # --help and friends come back as their exit code
            code = result if isinstance(result, int) else EXIT_OK
        except click.exceptions.Exit as e:
            code = e.exit_code
        except click.ClickException as e:
            e.show()
            code = EXIT_INPUT_ERROR
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            code = EXIT_INPUT_ERROR
        except (EvaluationError, OSError) as e:
            click.echo(f"Error: {e}", err=True)
            code = EXIT_INPUT_ERROR
        except Exception as e:
            logger.exception("internal error")
            click.echo(f"Internal error: {e}", err=True)
            code = EXIT_INTERNAL_ERROR
        if standalone_mode:
            sys.exit(code)
        return code


def _write_svg(path: Path, document: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document, encoding='utf-8')
    return path


def _plots_for(evaluation: ModelEvaluation, out_dir: Path, config: Dict, prefix: str = "") -> List[Path]:
    names = config['output']
    plot = config['plot']
    written = [
        _write_svg(out_dir / f"{prefix}{names['roc_plot']}",
                   render_decorated_roc(evaluation.curve, evaluation.profile,
                                        config['markers']['thresholds'], plot,
                                        title=f"ROC curve: {evaluation.name}")),
        _write_svg(out_dir / f"{prefix}{names['classification_plot']}",
                   render_classification_plot(evaluation.profile, plot,
                                              title=f"TPR(t) and FPR(t): {evaluation.name}")),
    ]
    return written


def _banner(title: str):
    click.echo("=" * 70)
    click.echo(title)
    click.echo("=" * 70)


def common_options(fn):
    fn = click.option('--json-only', is_flag=True, help='Write the JSON report only, no SVG plots')(fn)
    fn = click.option('--output-dir', type=click.Path(file_okay=False),
                      help='Output directory (overrides ROC_EVAL_OUTPUT_DIR and config.yaml)')(fn)
    return fn


def bound_options(fn):
    fn = click.option('--cost-fn', type=click.FloatRange(min=0), help='Unit cost of a false negative')(fn)
    fn = click.option('--cost-fp', type=click.FloatRange(min=0), help='Unit cost of a false positive')(fn)
    fn = click.option('--fpr-max', type=click.FloatRange(0, 1), help='Largest acceptable FPR')(fn)
    fn = click.option('--tpr-min', type=click.FloatRange(0, 1), help='Smallest acceptable TPR')(fn)
    return fn


@click.group(cls=EvaluatorGroup)
@click.option('--config', 'config_path', type=click.Path(dir_okay=False),
              help='Configuration file (default: config.yaml next to the evaluator)')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging')
@click.pass_context
def cli(ctx, config_path, verbose):
    """Threshold-aware ROC evaluation of defect prediction models."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    ctx.obj = {'config': load_config(config_path)}


@cli.command()
@click.argument('scorefile', type=click.Path(exists=True, dir_okay=False))
@bound_options
@common_options
@click.pass_obj
def evaluate(obj, scorefile, tpr_min, fpr_max, cost_fp, cost_fn, output_dir, json_only):
    """Evaluate one score file."""
    config = obj['config']
    out_dir = resolve_output_dir(config, output_dir)

    evaluation = evaluate_model(read_scores(scorefile), config, tpr_min, fpr_max, cost_fp, cost_fn)
    report_path = write_report(build_evaluation_report(evaluation), out_dir / config['output']['report_file'])

    _banner(f"Evaluation: {evaluation.name}")
    for line in summary_lines(evaluation):
        click.echo(line)
    if evaluation.acceptable is not None:
        spans = ", ".join(str(iv) for iv in evaluation.acceptable.intervals) or "none"
        click.echo(f"  Acceptable thresholds (TPR>={tpr_min}, FPR<={fpr_max}): {spans}")
    if evaluation.cost is not None:
        spans = ", ".join(str(iv) for iv in evaluation.cost.argmin)
        click.echo(f"  Minimum expected cost {float(evaluation.cost.minimum):g} on {spans}")

    if not json_only:
        _plots_for(evaluation, out_dir, config)
        if evaluation.cost is not None:
            _write_svg(out_dir / config['output']['cost_plot'],
                       render_cost_plot([(evaluation.name, evaluation.cost)], config['plot']))
    click.echo(f"\nReport saved to: {report_path}")


@cli.command()
@click.argument('scorefile_a', type=click.Path(exists=True, dir_okay=False))
@click.argument('scorefile_b', type=click.Path(exists=True, dir_okay=False))
@bound_options
@common_options
@click.pass_obj
def compare(obj, scorefile_a, scorefile_b, tpr_min, fpr_max, cost_fp, cost_fn, output_dir, json_only):
    """Compare two score files of the same modules."""
    config = obj['config']
    out_dir = resolve_output_dir(config, output_dir)
    labels = ("A", "B")

    ds_a, ds_b = read_scores(scorefile_a), read_scores(scorefile_b)
    if ds_a.n != ds_b.n:
        logger.warning("compared models score different numbers of modules (%d vs %d)", ds_a.n, ds_b.n)
    ev_a = evaluate_model(ds_a, config, tpr_min, fpr_max, cost_fp, cost_fn)
    ev_b = evaluate_model(ds_b, config, tpr_min, fpr_max, cost_fp, cost_fn)
    report = build_comparison_report(ev_a, ev_b, tpr_min, fpr_max, labels)
    report_path = write_report(report, out_dir / config['output']['report_file'])

    comparison = report['comparison']
    _banner(f"Comparison: A={ev_a.name}  B={ev_b.name}")
    click.echo(f"  AUC A={ev_a.curve.auc:.4f}  B={ev_b.curve.auc:.4f}")
    click.echo(f"  {comparison['statement']}")
    region = comparison['acceptable_region']
    if region is not None:
        click.echo(f"  Wider acceptable range: {region['width_preference'] or 'tie'}")
        click.echo(f"  Better within common acceptable range: {region['in_range_preference'] or 'neither'}")
        for note in region['notes']:
            click.echo(f"  • {note}")
    if comparison['cost'] is not None:
        click.echo(f"  Cost preference: {comparison['cost']['preferred'] or 'none'} "
                   f"({comparison['cost']['reason']})")

    if not json_only:
        for label, evaluation in zip(labels, (ev_a, ev_b)):
            _plots_for(evaluation, out_dir, config, prefix=f"{label}_")
        _write_svg(out_dir / config['output']['comparison_plot'],
                   render_comparison_plot(ev_a.profile, ev_b.profile, tpr_min, fpr_max, labels,
                                          config['plot']))
        if ev_a.cost is not None and ev_b.cost is not None:
            _write_svg(out_dir / config['output']['cost_plot'],
                       render_cost_plot([(labels[0], ev_a.cost), (labels[1], ev_b.cost)],
                                        config['plot']))
    click.echo(f"\nReport saved to: {report_path}")


def _split_features(value: Optional[str]) -> Optional[List[str]]:
    if not value:
        return None
    return [f.strip() for f in value.split(',') if f.strip()]


@cli.command()
@click.argument('featurefile', type=click.Path(exists=True, dir_okay=False))
@click.option('--features', help='Comma-separated feature columns (default: all)')
@click.option('--label-column', help='Label column name (default from config)')
@click.option('--ridge', type=click.FloatRange(min=0), help='Ridge penalty (default from config)')
@common_options
@click.pass_obj
def score(obj, featurefile, features, label_column, ridge, output_dir, json_only):
    """Fit logistic regression with leave-one-out cross-validation and write a score file."""
    config = obj['config']
    scorer = config['scorer']
    out_dir = resolve_output_dir(config, output_dir)
    ridge = scorer['ridge'] if ridge is None else ridge

    dataset = read_features(featurefile, label_column or config['study']['label_column'],
                            features=_split_features(features))
    options = dict(max_iterations=scorer['max_iterations'], tolerance=scorer['tolerance'],
                   separation_bound=scorer['separation_bound'], ridge=ridge)

    loocv = loocv_scores(dataset, **options)
    try:
        full_model = fit_logistic(dataset, **options).to_dict()
    except CollinearFeaturesError as e:
        logger.warning("no model on the full data: %s", e)
        full_model = None

    scores_path = write_scores(loocv.scores, out_dir / f"{dataset.name}_scores.csv")
    evaluation = evaluate_model(loocv.scores, config)
    report = build_scoring_report(dataset.name, dataset.n, dataset.feature_names, loocv.to_dict(),
                                  full_model, str(scores_path), evaluation)
    report_path = write_report(report, out_dir / config['output']['report_file'])

    _banner(f"Scoring: {dataset.name}  features={','.join(dataset.feature_names)}")
    click.echo(f"  Rows: {dataset.n}  leave-one-out folds with fallback: {len(loocv.fallback_folds)}"
               f"  separation: {len(loocv.separation_folds)}")
    for line in summary_lines(evaluation):
        click.echo(line)
    if not json_only:
        _plots_for(evaluation, out_dir, config)
    click.echo(f"\nScores saved to: {scores_path}")
    click.echo(f"Report saved to: {report_path}")


@cli.command()
@click.argument('study_config', type=click.Path(exists=True, dir_okay=False))
@click.option('--output-dir', type=click.Path(file_okay=False), help='Override the study output directory')
@click.option('--workers', type=click.IntRange(min=1), help='Parallel workers (overrides the study file)')
@click.pass_obj
def study(obj, study_config, output_dir, workers):
    """Run the batch protocol described by a study configuration file."""
    config = obj['config']
    cfg = StudyConfig.from_file(study_config, config)
    if output_dir:
        cfg.output_dir = Path(output_dir)
    if workers:
        cfg.workers = workers

    report = run_study(cfg, config)
    models, pairs = report.model_counts, report.pair_counts

    _banner(f"Study: {len(cfg.datasets)} dataset(s), k={cfg.combination_size}")
    click.echo(f"  Models: {models['total_models']}")
    click.echo(f"    AUC > 0.5:                 {models['count_auc_gt_half']}")
    click.echo(f"    no points below bisector:  {models['count_no_points_below_bisector']}")
    click.echo(f"    strictly above bisector:   {models['count_strictly_above']}")
    click.echo(f"    AUC >= 0.8:                {models['count_auc_ge_08']}")
    click.echo(f"    better than random for all t: {models['count_condition1_holds']}")
    click.echo(f"  Pairwise comparisons: {pairs['total_comparisons']}")
    click.echo(f"    one ROC curve dominates:   {pairs['dominance_count']}")
    click.echo(f"    dominant model threshold-superior: {pairs['condition2_count']}")
    for row in pairs['by_auc_gap']:
        click.echo(f"    AUC gap > {row['gap']:g}: dominance {row['dominance_count']}, "
                   f"superior {row['condition2_count']}")
    if report.failures:
        click.echo("\nFailures:")
        for failure in report.failures:
            click.echo(f"  • {failure.get('model_id', failure['dataset'])}: {failure['error']}")
    if not report.audit['consistent']:
        raise RuntimeError("study aggregates disagree with the recount of their records")
    click.echo(f"\nResults saved to: {cfg.output_dir}")


def main(argv: Optional[List[str]] = None) -> int:
    return cli.main(args=argv, prog_name="roc-eval", standalone_mode=False)


if __name__ == '__main__':
    sys.exit(main())
