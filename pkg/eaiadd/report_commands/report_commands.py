# -*- coding: utf-8 -*-
""" Report subcommands for EAI-ADD: detection metrics of trained
checkpoints and the emotion/acoustic change-correlation analysis.
"""

# Imports
import os

import click
import numpy as np

from eaiadd.feature_store import load_manifest
from eaiadd.helper_funcs import (DEFAULT_PROVENANCE, load_tdcf_params,
                                 write_json)
from eaiadd.metrics import (bundle_correlation, change_magnitude_curve,
                            compute_eer, compute_min_tdcf,
                            corpus_inconsistency_report)
from eaiadd.model import load_checkpoint
from eaiadd.training import score_bundles


# Supporting Functions
def print_provenance():
    click.secho("Default provenance", bold=True, err=True)
    for name, value, origin in DEFAULT_PROVENANCE:
        fg = 'green' if origin == "published" else 'yellow'
        click.echo("  %-14s %-14s %s" % (name, value,
                                          click.style(origin, fg=fg)),
                   err=True)


def checkpoint_metrics(path, bundles, tdcf_params):
    params = load_checkpoint(path)
    with click.progressbar(bundles, label="Scoring %s" % path,
                           file=click.get_text_stream('stderr')) as bar:
        scores = score_bundles(bar, params)
    bonafide, spoof = scores.split()
    eer, threshold = compute_eer(scores)
    result = {"eer": eer, "eer_threshold": threshold,
              "n_bonafide": int(bonafide.size), "n_spoof": int(spoof.size)}
    if tdcf_params is not None:
        result["min_tdcf"] = compute_min_tdcf(scores, tdcf_params)
    return result


def write_change_curves(bundle, out_dir):
    """One CSV per bundle; row t holds the normalized change landing on
    frame t (1-based over the T-1 transitions)."""
    emo = change_magnitude_curve(bundle.emo_frames)
    acu = change_magnitude_curve(bundle.acu_frames)
    index = np.arange(1, emo.size + 1)
    path = os.path.join(out_dir, "%s.csv" % bundle.id)
    np.savetxt(path, np.column_stack((index, emo, acu)),
               fmt=("%d", "%.17g", "%.17g"), delimiter=",",
               header="frame_index,emo_change,acu_change", comments="")
    return path


# Click Command Definitions
@click.command('eval', short_help='Score checkpoints: EER and min t-DCF.')
@click.option('--checkpoint', 'checkpoints', multiple=True, required=True,
              type=click.Path(dir_okay=False),
              help="EAIM checkpoint; repeat to report several runs.")
@click.option('-m', '--manifest', required=True,
              type=click.Path(dir_okay=False))
@click.option('--tdcf-params', default=None, type=click.Path(dir_okay=False),
              help="YAML/JSON t-DCF cost model; min t-DCF is only "
                   "reported when given.")
@click.option('-o', '--out', default=None, type=click.Path(dir_okay=False),
              help="Also write the metrics JSON to this file.")
def evaluate(checkpoints, manifest, tdcf_params, out):
    """Scores every bundle of MANIFEST with each checkpoint and prints the
    metrics as JSON."""
    print_provenance()
    params = load_tdcf_params(tdcf_params) if tdcf_params else None
    bundles = load_manifest(manifest)
    runs = [checkpoint_metrics(path, bundles, params) for path in checkpoints]
    if len(runs) == 1:
        result = runs[0]
    else:
        for path, run in zip(checkpoints, runs):
            run["checkpoint"] = path
        result = {"runs": runs,
                  "mean_eer": float(np.mean([r["eer"] for r in runs]))}
        if params is not None:
            result["mean_min_tdcf"] = float(
                np.mean([r["min_tdcf"] for r in runs]))
    click.echo(write_json(result, out), nl=False)


@click.command('analyze',
               short_help='Emotion/acoustic change correlation per label.')
@click.option('-m', '--manifest', required=True,
              type=click.Path(dir_okay=False))
@click.option('-o', '--out-dir', required=True,
              type=click.Path(file_okay=False))
def analyze(manifest, out_dir):
    """Writes normalized change-magnitude curves per bundle and a
    summary.json with per-label Pearson statistics."""
    bundles = load_manifest(manifest)
    os.makedirs(out_dir, exist_ok=True)
    for bundle in bundles:
        write_change_curves(bundle, out_dir)
    report = corpus_inconsistency_report(bundles)
    summary = {label: (stats.to_dict() if stats is not None else None)
               for label, stats in report.items()}
    summary["per_bundle"] = {b.id: bundle_correlation(b) for b in bundles}
    write_json(summary, os.path.join(out_dir, "summary.json"))

    click.secho("Change correlation", bold=True)
    for label in ("bonafide", "spoof"):
        stats = report[label]
        if stats is None or stats.mean is None:
            click.echo("  %-9s %s" % (label, click.style("absent",
                                                         fg='yellow')))
            continue
        click.echo("  %-9s n=%d skipped=%d mean=%.4f std=%.4f"
                   % (label, stats.n, stats.n_skipped, stats.mean,
                      stats.std))
