# -*- coding: utf-8 -*-
""" Synthetic dataset subcommand for EAI-ADD.
"""

import os

import click

from eaiadd.synthgen import SynthConfig, gen_dataset


# Click Command Definitions
@click.command('synth', short_help='Generate a synthetic feature dataset.')
@click.option('-o', '--out-dir', required=True, type=click.Path(file_okay=False),
              help="Directory receiving the EAIF files and manifest.jsonl.")
@click.option('--num-bonafide', default=100, show_default=True,
              type=click.IntRange(min=0))
@click.option('--num-spoof', default=100, show_default=True,
              type=click.IntRange(min=0))
@click.option('--frames', default=64, show_default=True,
              type=click.IntRange(min=8), help="Frames per utterance (T).")
@click.option('--d-e', default=16, show_default=True,
              type=click.IntRange(min=1), help="Emotion feature dimension.")
@click.option('--d-a', default=16, show_default=True,
              type=click.IntRange(min=1), help="Acoustic feature dimension.")
@click.option('--noise-sigma', default=0.05, show_default=True,
              type=click.FloatRange(min=0))
@click.option('--burst-rate', default=0.15, show_default=True,
              type=click.FloatRange(0, 1),
              help="Per-frame probability of an unmatched jump (spoof).")
@click.option('--burst-scale', default=1.0, show_default=True,
              type=click.FloatRange(min=0, min_open=True))
@click.option('--latent-dim', default=4, show_default=True,
              type=click.IntRange(min=1),
              help="Dimension of the latent trajectory behind each stream.")
@click.option('--seed', default=0, show_default=True,
              type=click.IntRange(min=0))
@click.option('--map-seed', default=0, show_default=True,
              type=click.IntRange(min=0),
              help="Seed of the latent-to-feature maps; keep it equal "
                   "across splits that share one feature space.")
def synth(out_dir, num_bonafide, num_spoof, frames, d_e, d_a, noise_sigma,
          burst_rate, burst_scale, latent_dim, seed, map_seed):
    """Writes NUM_BONAFIDE co-varying and NUM_SPOOF desynchronised
    synthetic utterances as EAIF files plus a manifest."""
    cfg = SynthConfig(n_frames=frames, d_e=d_e, d_a=d_a,
                      noise_sigma=noise_sigma, burst_rate=burst_rate,
                      burst_scale=burst_scale, seed=seed,
                      latent_dim=latent_dim, map_seed=map_seed)
    manifest = gen_dataset(cfg, num_bonafide, num_spoof, out_dir)
    click.echo("Wrote %d bundles and %s"
               % (len(manifest), os.path.join(out_dir, "manifest.jsonl")),
               err=True)
