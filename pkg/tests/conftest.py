import numpy as np
import pytest

from eaiadd.feature_store import FeatureBundle
from eaiadd.model import ModelConfig, init_parameters
from eaiadd.synthgen import SynthConfig, gen_dataset


def random_bundle(seed, n_frames=6, d_e=4, d_a=4, label="bonafide",
                  bundle_id=None):
    rng = np.random.default_rng(seed)
    return FeatureBundle(bundle_id or "%s_%d" % (label, seed),
                         rng.normal(size=(n_frames, d_e)),
                         rng.normal(size=d_e),
                         rng.normal(size=(n_frames, d_a)), label)


@pytest.fixture
def bundle():
    return random_bundle(0)


@pytest.fixture
def small_config():
    return ModelConfig(d_e=4, d_a=4, d_model=4)


@pytest.fixture
def small_params(small_config):
    return init_parameters(small_config, seed=0)


@pytest.fixture
def small_dataset(tmp_path):
    """4 + 4 short synthetic utterances on disk; returns the manifest path."""
    cfg = SynthConfig(n_frames=8, d_e=4, d_a=4, latent_dim=2, seed=1)
    out_dir = tmp_path / "data"
    gen_dataset(cfg, 4, 4, str(out_dir))
    return out_dir / "manifest.jsonl"
