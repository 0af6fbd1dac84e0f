import csv
import re

import numpy as np
import pytest

from sbx.cli import main
from sbx.config import preset
from sbx.features import corpus_lsd
from sbx.formats import load_model, read_frames, write_frames
from sbx.synth import make_synthetic_corpus


def _fast_config(tmp_path, name="desk", epochs=3):
    text = preset(name)
    lines = []
    for line in text.splitlines():
        if line.startswith("max_epochs"):
            continue
        lines.append(line)
        if line.startswith("[layer") or line.startswith("[finetune"):
            lines.append(f"max_epochs = {epochs}")
    path = tmp_path / f"{name}.ini"
    path.write_text("\n".join(lines) + "\n")
    return path


def _read_csv(path):
    with open(path) as f:
        return list(csv.reader(f))


@pytest.fixture
def corpus(tmp_path):
    x = make_synthetic_corpus(1, 120, 64)
    write_frames(tmp_path / "train.sbfm", x[:100])
    write_frames(tmp_path / "valid.sbfm", x[100:])
    return tmp_path


def test_pretrain_finetune_encode_reconstruct(corpus, capsys):
    cfg = _fast_config(corpus)
    t, v = str(corpus / "train.sbfm"), str(corpus / "valid.sbfm")
    assert main(["pretrain", t, v, "--config", str(cfg), "--out", str(corpus / "m.sbx"),
                 "--report", str(corpus / "pre.csv")]) == 0
    rows = _read_csv(corpus / "pre.csv")
    assert rows[0] == ["layer", "epoch", "train_loss", "valid_loss", "best_valid_loss"]
    assert len(rows) == 1 + 3 * 3
    assert main(["finetune", str(corpus / "m.sbx"), t, v, "--config", str(cfg),
                 "--out", str(corpus / "f.sbx"), "--report", str(corpus / "ft.csv")]) == 0
    ft = _read_csv(corpus / "ft.csv")
    best = [float(r[3]) for r in ft[1:]]
    assert all(b <= a for a, b in zip(best, best[1:]))
    assert main(["encode", str(corpus / "f.sbx"), v, "--out", str(corpus / "feat.sbfm")]) == 0
    feats = read_frames(corpus / "feat.sbfm")
    assert feats.shape == (20, 8)
    assert main(["reconstruct", str(corpus / "f.sbx"), t, "--out", str(corpus / "r.sbfm"),
                 "--report", str(corpus / "lsd.csv")]) == 0
    out = capsys.readouterr().out
    mean_lsd = float(re.search(r"mean LSD ([0-9.]+) dB", out).group(1))
    assert np.isfinite(mean_lsd)
    assert read_frames(corpus / "r.sbfm").shape == (100, 64)


def test_paper_shape_model(tmp_path):
    cfg = _fast_config(tmp_path, "paper_dda", epochs=1)
    write_frames(tmp_path / "t.sbfm", make_synthetic_corpus(2, 20, 2049))
    assert main(["pretrain", str(tmp_path / "t.sbfm"), "--config", str(cfg),
                 "--out", str(tmp_path / "m.sbx")]) == 0
    model = load_model(tmp_path / "m.sbx")
    assert model.network.dims == [2049, 500, 180, 120]
    assert main(["encode", str(tmp_path / "m.sbx"), str(tmp_path / "t.sbfm"),
                 "--out", str(tmp_path / "f.sbfm")]) == 0
    assert read_frames(tmp_path / "f.sbfm").shape == (20, 120)


def test_empty_training_file(tmp_path, capsys):
    cfg = _fast_config(tmp_path)
    write_frames(tmp_path / "e.sbfm", np.zeros((0, 64)))
    code = main(["pretrain", str(tmp_path / "e.sbfm"), "--config", str(cfg),
                 "--out", str(tmp_path / "m.sbx")])
    assert code == 2
    assert "empty dataset" in capsys.readouterr().err


def test_usage_errors(corpus, tmp_path):
    cfg = _fast_config(tmp_path)
    assert main(["pretrain", str(tmp_path / "missing.sbfm"), "--config", str(cfg),
                 "--out", str(tmp_path / "m.sbx")]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[layer 1]\ndims = 64-8\n")
    assert main(["pretrain", str(corpus / "train.sbfm"), "--config", str(bad),
                 "--out", str(tmp_path / "m.sbx")]) == 2
    write_frames(tmp_path / "narrow.sbfm", np.ones((5, 10)))
    assert main(["pretrain", str(tmp_path / "narrow.sbfm"), "--config", str(cfg),
                 "--out", str(tmp_path / "m.sbx")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_pretrain_deterministic_bytes(corpus):
    cfg = _fast_config(corpus)
    for name in ("a.sbx", "b.sbx"):
        assert main(["pretrain", str(corpus / "train.sbfm"), "--config", str(cfg),
                     "--seed", "5", "--out", str(corpus / name)]) == 0
    assert (corpus / "a.sbx").read_bytes() == (corpus / "b.sbx").read_bytes()
    assert main(["pretrain", str(corpus / "train.sbfm"), "--config", str(cfg),
                 "--seed", "6", "--out", str(corpus / "c.sbx")]) == 0
    assert (corpus / "a.sbx").read_bytes() != (corpus / "c.sbx").read_bytes()


def test_finetune_zero_epochs_identical(corpus):
    cfg = _fast_config(corpus)
    assert main(["pretrain", str(corpus / "train.sbfm"), "--config", str(cfg),
                 "--out", str(corpus / "m.sbx")]) == 0
    zero = _fast_config(corpus, epochs=0)
    assert main(["finetune", str(corpus / "m.sbx"), str(corpus / "train.sbfm"),
                 "--config", str(zero), "--out", str(corpus / "f.sbx")]) == 0
    assert (corpus / "m.sbx").read_bytes() == (corpus / "f.sbx").read_bytes()


def test_eval(tmp_path, capsys):
    x = make_synthetic_corpus(4, 10, 32)
    write_frames(tmp_path / "a.sbfm", x)
    write_frames(tmp_path / "b.sbfm", 10 * x)
    write_frames(tmp_path / "c.sbfm", x[:5])
    assert main(["eval", str(tmp_path / "a.sbfm"), str(tmp_path / "a.sbfm")]) == 0
    assert "mean LSD 0.000000 dB" in capsys.readouterr().out
    assert main(["eval", str(tmp_path / "a.sbfm"), str(tmp_path / "b.sbfm"),
                 "--report", str(tmp_path / "e.csv")]) == 0
    assert "mean LSD 20.000000 dB" in capsys.readouterr().out
    rows = _read_csv(tmp_path / "e.csv")
    assert rows[0] == ["frame", "lsd_db", "mse"] and len(rows) == 11
    assert abs(float(rows[1][1]) - 20.0) < 1e-9
    assert main(["eval", str(tmp_path / "a.sbfm"), str(tmp_path / "c.sbfm")]) == 2


def test_eval_log_domain(tmp_path, capsys):
    x = np.log(make_synthetic_corpus(4, 6, 16))
    write_frames(tmp_path / "a.sbfm", x)
    write_frames(tmp_path / "b.sbfm", x + np.log(10.0))
    assert main(["eval", str(tmp_path / "a.sbfm"), str(tmp_path / "b.sbfm"),
                 "--domain", "log"]) == 0
    assert "mean LSD 20.000000 dB" in capsys.readouterr().out


def test_csv_frames(tmp_path):
    x = make_synthetic_corpus(4, 6, 16)
    np.savetxt(tmp_path / "a.csv", x, delimiter=",", fmt="%.17g")
    assert main(["eval", str(tmp_path / "a.csv"), str(tmp_path / "a.csv")]) == 0


def test_synth_data(tmp_path):
    for name in ("a.sbfm", "b.sbfm"):
        assert main(["synth-data", "--seed", "9", "--frames", "30", "--bins", "64",
                     "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.sbfm").read_bytes() == (tmp_path / "b.sbfm").read_bytes()
    assert np.all(read_frames(tmp_path / "a.sbfm") > 0)


def test_exp_depth_schema(tmp_path):
    cfg = _fast_config(tmp_path, epochs=2)
    write_frames(tmp_path / "d.sbfm", make_synthetic_corpus(3, 100, 64))
    assert main(["exp-depth", str(tmp_path / "d.sbfm"), "--config", str(cfg), "--seed", "1",
                 "--out", str(tmp_path / "depth.csv")]) == 0
    rows = _read_csv(tmp_path / "depth.csv")
    assert rows[0] == ["depth", "seed", "train_mse", "valid_mse", "test_mse"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3"]
    assert all(np.isfinite(float(v)) for r in rows[1:] for v in r[2:])


def test_exp_baseline_schema_and_cross_check(tmp_path):
    cfg = _fast_config(tmp_path, epochs=2)
    write_frames(tmp_path / "d.sbfm", make_synthetic_corpus(3, 100, 64))
    dump = tmp_path / "dump"
    assert main(["exp-baseline", str(tmp_path / "d.sbfm"), "--config", str(cfg),
                 "--out", str(tmp_path / "b.csv"), "--dump-dir", str(dump)]) == 0
    rows = _read_csv(tmp_path / "b.csv")
    assert rows[0] == ["method", "k", "seed", "mean_lsd", "mean_mse"]
    assert len(rows) == 1 + 2 * 3
    for seed in (1, 2, 3):
        methods = sorted(r[0] for r in rows[1:] if r[2] == str(seed))
        assert methods == ["dae", "dct"]
        dct_row = next(r for r in rows[1:] if r[2] == str(seed) and r[0] == "dct")
        original = read_frames(dump / f"original_seed{seed}.sbfm")
        recon = read_frames(dump / f"dct_seed{seed}.sbfm")
        assert abs(float(dct_row[3]) - corpus_lsd(original, recon, log_domain=True)[0]) <= 1e-9


def test_exp_baseline_unfair_k(tmp_path):
    cfg = _fast_config(tmp_path, epochs=1)
    cfg.write_text(cfg.read_text().replace("k = 8", "k = 12"))
    write_frames(tmp_path / "d.sbfm", make_synthetic_corpus(3, 50, 64))
    assert main(["exp-baseline", str(tmp_path / "d.sbfm"), "--config", str(cfg),
                 "--out", str(tmp_path / "b.csv")]) == 2
