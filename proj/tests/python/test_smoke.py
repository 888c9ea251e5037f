import json

import numpy as np
import pytest

import storn


def test_synth_shapes():
    seqs = storn.synth_coupled(5, steps=10, channels=4, seed=1)
    assert len(seqs) == 5
    assert all(s.shape == (10, 4) for s in seqs)
    assert set(np.unique(np.concatenate(seqs))) <= {0.0, 1.0}
    again = storn.synth_coupled(5, steps=10, channels=4, seed=1)
    assert all(np.array_equal(a, b) for a, b in zip(seqs, again))


def test_run_reports_usage_errors():
    code, _, err = storn.run(["eval", "--checkpoint", "/nonexistent.bin"])
    assert code == 2
    assert err


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    d = tmp_path_factory.mktemp("run")
    data = d / "data.txt"
    code, _, err = storn.run(["synth", "coupled", "-o", str(data), "-n", "60", "--seed", "3"])
    assert code == 0, err
    cfg = {
        "seed": 1,
        "output_dir": "out",
        "model": {"hidden": 8, "recog_hidden": 6, "latent": 2},
        "train": {"max_epochs": 3},
        "data": {"path": "data.txt", "format": "events", "channels": 4},
    }
    (d / "config.json").write_text(json.dumps(cfg))
    code, _, err = storn.run(["train", str(d / "config.json"), "-q"])
    assert code == 0, err
    return d


def test_model_round_trip(trained, tmp_path):
    m = storn.Model.load(trained / "out" / "checkpoint.bin")
    assert (m.kind, m.input, m.hidden, m.latent) == ("storn", 4, 8, 2)
    assert m.likelihood == "bernoulli"
    assert m.standardization is None
    m.save(tmp_path / "copy.bin")
    m2 = storn.Model.load(tmp_path / "copy.bin")
    for name, value in m.parameters().items():
        assert np.array_equal(value, m2.parameters()[name])


def test_bound_and_nll(trained):
    m = storn.Model.load(trained / "out" / "checkpoint.bin")
    seqs = storn.synth_coupled(4, steps=10, channels=4, seed=9)
    bound, kl, recon = m.bound(seqs, seed=2)
    assert np.allclose(np.array(kl) + np.array(recon), bound)
    assert all(k >= 0 for k in kl)
    nll, se = m.nll(seqs, samples=50, seed=4)
    assert len(nll) == 4 and all(np.isfinite(nll)) and all(s >= 0 for s in se)
    assert m.nll(seqs, samples=50, seed=4) == (nll, se)
    with pytest.raises(ValueError):
        m.bound([np.zeros((3, 5))])


def test_generate_keeps_prefix(trained):
    m = storn.Model.load(trained / "out" / "checkpoint.bin")
    prefix = storn.synth_coupled(2, steps=4, channels=4, seed=5)
    out = m.generate(prefix, horizon=6, seed=1)
    assert [o.shape for o in out] == [(10, 4), (10, 4)]
    for p, o in zip(prefix, out):
        assert np.array_equal(o[:4], p)
    assert all(np.array_equal(a, b) for a, b in zip(out, m.generate(prefix, horizon=6, seed=1)))
