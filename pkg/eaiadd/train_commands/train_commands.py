# -*- coding: utf-8 -*-
""" Training and gradient-check subcommands for EAI-ADD.
"""

import click

from eaiadd.classes import ValidationError
from eaiadd.eaimm import EvalConfig
from eaiadd.feature_store import load_manifest
from eaiadd.gradcheck import TOLERANCE, run_gradcheck
from eaiadd.helper_funcs import write_json
from eaiadd.model import ModelConfig, save_checkpoint
from eaiadd.training import TrainConfig, train as train_model


# Supporting Functions
def progress_bar(iterable=None, **kwargs):
    """Progress bar on stderr; only the label shows when stderr is not a
    terminal."""
    return click.progressbar(iterable, file=click.get_text_stream('stderr'),
                             **kwargs)


def format_breakdown(epoch, breakdown):
    return ("epoch %3d  total %.6f  ce %.6f  eval %.6f  s %+.6f"
            % (epoch + 1, breakdown.total, breakdown.ce, breakdown.eval,
               breakdown.s))


def eval_options(f):
    """Options shared by every command that builds an EvalConfig."""
    options = [
        click.option('--k', default=3, show_default=True,
                     type=click.IntRange(min=1),
                     help="Prototype window radius in frames."),
        click.option('--tau', default=0.5, show_default=True,
                     type=click.FloatRange(min=0, min_open=True),
                     help="Prototype weighting temperature."),
        click.option('--tau-nce', default=0.1, show_default=True,
                     type=click.FloatRange(min=0, min_open=True),
                     help="Contrastive temperature."),
        click.option('--n-neg-far', default=4, show_default=True,
                     type=click.IntRange(min=0)),
        click.option('--n-neg-shuffle', default=4, show_default=True,
                     type=click.IntRange(min=0)),
        click.option('--far-margin', default=None, type=click.IntRange(min=1),
                     help="Minimum index distance of far negatives "
                          "[default: max(2k+1, 8)]."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


# Click Command Definitions
@click.command('train', short_help='Train the detector.')
@click.option('-m', '--manifest', required=True, type=click.Path(dir_okay=False),
              help="Training manifest (JSON lines).")
@click.option('-o', '--out', required=True, type=click.Path(dir_okay=False),
              help="Checkpoint file to write.")
@click.option('--history', default=None, type=click.Path(dir_okay=False),
              help="Optional JSON file for the per-epoch loss breakdown.")
@click.option('--epochs', default=60, show_default=True,
              type=click.IntRange(min=1))
@click.option('--learning-rate', default=1e-5, show_default=True,
              type=click.FloatRange(min=0, min_open=True))
@click.option('--weight-decay', default=1e-4, show_default=True,
              type=click.FloatRange(min=0))
@click.option('--batch-size', default=8, show_default=True,
              type=click.IntRange(min=1),
              help="Utterances accumulated per optimizer step.")
@click.option('--d-model', default=32, show_default=True,
              type=click.IntRange(min=1))
@click.option('--seed', default=0, show_default=True,
              type=click.IntRange(min=0))
@eval_options
@click.option('--no-eaam', is_flag=True,
              help="Ablation: linear projections, no alignment.")
@click.option('--no-eval', is_flag=True,
              help="Ablation: drop the variation amplification loss.")
@click.option('--no-hig', is_flag=True,
              help="Ablation: mean-pool aligned frames into the classifier.")
@click.option('--linear-streams', is_flag=True,
              help="Variant: linear projections instead of ARS/ERS.")
@click.option('--graph-layer', default='gat', show_default=True,
              type=click.Choice(['gat', 'gcn']),
              help="Variant: attention or uniform neighbour averaging.")
def train(manifest, out, history, epochs, learning_rate, weight_decay,
          batch_size, d_model, seed, k, tau, tau_nce, n_neg_far,
          n_neg_shuffle, far_margin, no_eaam, no_eval, no_hig,
          linear_streams, graph_layer):
    """Trains on every bundle of MANIFEST and writes a checkpoint."""
    bundles = load_manifest(manifest)
    if not bundles:
        raise ValidationError("manifest '%s' is empty" % manifest)
    eval_cfg = EvalConfig(k=k, tau=tau, tau_nce=tau_nce, n_neg_far=n_neg_far,
                          n_neg_shuffle=n_neg_shuffle, far_margin=far_margin)
    cfg = TrainConfig(epochs=epochs, learning_rate=learning_rate,
                      weight_decay=weight_decay, batch_size=batch_size,
                      seed=seed, eval_cfg=eval_cfg)
    model_cfg = ModelConfig(d_e=bundles[0].d_e, d_a=bundles[0].d_a,
                            d_model=d_model, use_eaam=not no_eaam,
                            linear_streams=linear_streams,
                            use_hig=not no_hig, graph_layer=graph_layer,
                            use_eval=not no_eval)

    with progress_bar(length=epochs, label="Training",
                      item_show_func=lambda b: b and "loss %.6f" % b.total
                      ) as bar:
        result = train_model(bundles, model_cfg, cfg,
                             on_epoch=lambda epoch, b: bar.update(1, b))
    for epoch, breakdown in enumerate(result.history):
        click.echo(format_breakdown(epoch, breakdown), err=True)
    for warning in result.warnings:
        click.secho("Warning: %s" % warning, fg='yellow', err=True)
    save_checkpoint(result.params, out)
    if history:
        write_json([b.to_dict() for b in result.history], history)
    click.echo(write_json(result.history[-1].to_dict()), nl=False)


@click.command('gradcheck',
               short_help='Check gradients against finite differences.')
@click.option('--seed', default=0, show_default=True,
              type=click.IntRange(min=0))
@click.option('--frames', default=6, show_default=True,
              type=click.IntRange(min=2))
@click.option('--d-model', default=4, show_default=True,
              type=click.IntRange(min=1))
@click.option('--k', default=1, show_default=True,
              type=click.IntRange(min=1))
def gradcheck(seed, frames, d_model, k):
    """Compares backprop with central differences for every parameter
    group of a small random instance and prints the maximum relative error
    per group."""
    def progress(groups):
        with progress_bar(groups, label="Checking gradients",
                          item_show_func=lambda g: g and g[0]) as bar:
            yield from bar

    report = run_gradcheck(seed, k=k, n_frames=frames, d_model=d_model,
                           progress=progress)
    click.secho("Gradient check (seed %d)" % seed, bold=True)
    for group in sorted(report.errors):
        error = report.errors[group]
        fg = 'green' if error < TOLERANCE else 'red'
        click.echo("  %-20s %5d  %s" % (group, report.n_checked[group],
                                        click.style("%.3e" % error, fg=fg)))
    click.echo("  %-20s %5s  %.3e" % ("s closed form", "",
                                     report.s_closed_form_error))
    if not report.passed():
        raise ValidationError("gradient check failed: max relative error "
                              "%.3e >= %.0e" % (report.max_error, TOLERANCE))
