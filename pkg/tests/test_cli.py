import hashlib
import json
import shutil

import numpy as np
import pytest

from creakml.cli import main
from creakml.corpus import RecordingManifestEntry, write_manifest
from creakml.ml import ClassifierSpec
from creakml.pipeline import ConfigError, ExperimentConfig
from creakml.preprocess import Waveform, write_wav


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture
def corpus_copy(small_corpus, tmp_path):
    """A private copy of the small corpus so cache state is per-test."""
    src = small_corpus.manifest_path.parent
    dst = tmp_path / "data"
    shutil.copytree(src, dst)
    return dst / "manifest.csv"


def test_synth(tmp_path, capsys):
    args = ["synth", "--n-per-class", "3", "--seed", "1", "--duration", "4"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    out = capsys.readouterr().out
    assert "Low: 3  High: 3" in out
    assert len(list((tmp_path / "a").glob("*.wav"))) == 6
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert sha(tmp_path / "a" / "manifest.csv") == sha(tmp_path / "b" / "manifest.csv")
    assert sha(tmp_path / "a" / "spk004.wav") == sha(tmp_path / "b" / "spk004.wav")


def test_synth_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--n-per-class", "0", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_extract_and_cache(corpus_copy, tmp_path, capsys):
    args = ["-q", "extract", "--manifest", str(corpus_copy), "--out", str(tmp_path / "res"), "--jobs", "1"]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert "12 recordings, 36 cache entries (0 hits)" in out
    for line in ("spectrogram: 4104", "melspectrogram: 1024", "mfcc: 312"):
        assert line in out
    assert len(list((tmp_path / "res" / "cache").glob("*.npz"))) == 36
    assert main(args) == 0
    assert "(36 hits)" in capsys.readouterr().out
    # a rewritten recording is extracted again
    shutil.copy(corpus_copy.parent / "spk002.wav", corpus_copy.parent / "spk001.wav")
    assert main(args) == 0
    assert "(33 hits)" in capsys.readouterr().out


def test_cache_dir_env(corpus_copy, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("CREAKML_CACHE_DIR", str(tmp_path / "elsewhere"))
    assert main(["-q", "extract", "--manifest", str(corpus_copy), "--out", str(tmp_path / "res"),
                 "--features", "mfcc", "--jobs", "1"]) == 0
    assert len(list((tmp_path / "elsewhere").glob("mfcc-*.npz"))) == 12
    assert not (tmp_path / "res" / "cache").exists()


def test_extract_short_recording(tmp_path, caplog):
    write_wav(tmp_path / "short.wav", Waveform(0.5 * np.sin(np.arange(1000) / 3.0), 16000))
    write_wav(tmp_path / "ok.wav", Waveform(0.5 * np.sin(np.arange(32000) / 3.0), 16000))
    write_manifest([RecordingManifestEntry("short.wav", "S1", 0.5, 0.5),
                    RecordingManifestEntry("ok.wav", "S2", 3.0, 3.0)], tmp_path / "m.csv")
    code = main(["extract", "--manifest", str(tmp_path / "m.csv"), "--out", str(tmp_path / "res"),
                 "--jobs", "1"])
    assert code == 1
    assert "short.wav" in caplog.text


def test_evaluate_one_cell_and_report(corpus_copy, tmp_path, capsys):
    out = tmp_path / "res"
    code = main(["-q", "evaluate", "--manifest", str(corpus_copy), "--out", str(out),
                 "--features", "mfcc", "--classifiers", "dt", "--seeds", "0,1", "--jobs", "1"])
    assert code == 0
    csv_text = (out / "report.csv").read_text()
    assert csv_text.splitlines()[0] == "classifier,feature,mean,std"
    assert len(csv_text.splitlines()) == 2 and csv_text.startswith("classifier,feature,mean,std\ndt,mfcc,")
    assert sorted(p.name for p in (out / "runs").iterdir()) == ["dt__mfcc__seed0.json", "dt__mfcc__seed1.json"]
    cfg = ExperimentConfig.load(out / "config.json")
    assert cfg.features == ["mfcc"] and cfg.seeds == [0, 1]
    log = json.loads((out / "runs" / "dt__mfcc__seed0.json").read_text())
    assert len(log["folds"]) == 12 and {"speaker", "true", "pred"} <= set(log["folds"][0])

    assert main(["report", "--runs", str(out / "runs"), "--format", "csv"]) == 0
    assert capsys.readouterr().out == csv_text
    assert main(["report", "--runs", str(out / "runs"), "--out", str(tmp_path / "again")]) == 0
    assert (tmp_path / "again" / "report.md").read_text() == (out / "report.md").read_text()


def test_evaluate_from_config_file(corpus_copy, tmp_path):
    cfg = ExperimentConfig(manifest="data/manifest.csv", features=["melspectrogram"],
                           classifiers=[ClassifierSpec("dt", {"max_depth": 2})], seeds=[0],
                           output_dir="out")
    (tmp_path / "exp.json").write_text(cfg.dumps())
    assert main(["-q", "evaluate", "--config", str(tmp_path / "exp.json"), "--jobs", "1"]) == 0
    echo = json.loads((tmp_path / "out" / "config.json").read_text())
    assert echo["classifiers"] == [{"kind": "dt", "params": {"max_depth": 2}, "seed": 0}]
    assert echo["manifest"] == str(tmp_path / "data" / "manifest.csv")
    # flags override file values
    assert main(["-q", "evaluate", "--config", str(tmp_path / "exp.json"), "--features", "mfcc",
                 "--out", str(tmp_path / "out2"), "--jobs", "1"]) == 0
    assert "dt,mfcc," in (tmp_path / "out2" / "report.csv").read_text()


def test_config_roundtrip_and_errors(tmp_path):
    cfg = ExperimentConfig(manifest="m.csv", seeds=[3, 1], features=["mfcc", "spectrogram"])
    assert ExperimentConfig.from_dict(json.loads(cfg.dumps())).dumps() == cfg.dumps()
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"manifest": "m.csv", "colour": "red"})
    (tmp_path / "bad.json").write_text('{"manifest": "missing.csv"}')
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "bad.json")
    assert main(["evaluate", "--config", str(tmp_path / "bad.json")]) == 1
