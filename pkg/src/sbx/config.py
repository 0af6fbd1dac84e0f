"""Training configuration files.

Plain INI blocks, one per pretrained layer plus an optional fine-tuning
block, using the short keys of the published hyperparameter table::

    [preprocess]
    sample_rate = 48000
    warp = bark            ; or none
    headroom = 0.95

    [layer 1]
    dims = 2049-500
    lr = 0.01
    m = 0.1                ; momentum
    b = 150                ; batch size
    s = 5252               ; seed
    d = 0.1                ; masking probability, N.A for none

    [finetune]
    lr = 0.001
    m = 0.9
    b = 100
    s = 2208
    d = N.A

Optional per-block keys: ``max_epochs``, ``patience``, ``enc_act`` and
``dec_act`` (layer blocks only).  An ``[experiment]`` block configures the
``exp-depth`` and ``exp-baseline`` commands.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources

from .core import Activation
from .training import Hyperparams


class ConfigError(ValueError):
    pass


@dataclass
class LayerConfig:
    n_in: int
    n_out: int
    hp: Hyperparams
    enc_act: Activation = Activation.TANH
    dec_act: Activation = Activation.TANH


@dataclass
class ExperimentConfig:
    seeds: list = field(default_factory=lambda: [1, 2, 3])
    split: tuple = (0.8, 0.1, 0.1)
    k: int | None = None


@dataclass
class TrainConfig:
    layers: list
    finetune: Hyperparams | None = None
    sample_rate: float = 48000.0
    warp: str = "bark"
    headroom: float = 0.95
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    @property
    def dims(self):
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]

    def with_seed(self, seed):
        """Copy reseeded from one run seed.

        Layer ``k`` gets ``1000 * seed + k`` and fine-tuning gets
        ``1000 * seed + len(layers)``, so runs with different seeds never
        share a stream.
        """
        base = 1000 * int(seed)
        layers = [LayerConfig(lc.n_in, lc.n_out, _replace(lc.hp, seed=base + k),
                              lc.enc_act, lc.dec_act)
                  for k, lc in enumerate(self.layers)]
        ft = None if self.finetune is None else _replace(self.finetune, seed=base + len(layers))
        return TrainConfig(layers, ft, self.sample_rate, self.warp, self.headroom, self.experiment)


def _replace(hp, **changes):
    d = hp.to_dict()
    d.update(changes)
    return Hyperparams(**d)


_NA = {"", "n.a", "n.a.", "na", "none"}


def _hyperparams(section, name):
    try:
        d = section.get("d", "N.A").strip()
        return Hyperparams(
            lr=float(section["lr"]),
            momentum=float(section.get("m", "0")),
            batch_size=int(section["b"]),
            seed=int(section.get("s", "0")),
            mask_d=None if d.lower() in _NA else float(d),
            max_epochs=int(section.get("max_epochs", "1000")),
            patience=int(section.get("patience", "20")),
        )
    except KeyError as exc:
        raise ConfigError(f"[{name}] is missing key {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"[{name}]: {exc}") from None


def _int_list(text, sep=","):
    return [int(v) for v in re.split(rf"\s*{re.escape(sep)}\s*", text.strip()) if v]


def parse_config(text, source="<config>"):
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    layer_sections = sorted(
        (s for s in parser.sections() if re.fullmatch(r"layer\s+\d+", s)),
        key=lambda s: int(s.split()[1]),
    )
    if not layer_sections:
        raise ConfigError(f"{source}: no [layer N] blocks")
    layers = []
    for name in layer_sections:
        sec = parser[name]
        if "dims" not in sec:
            raise ConfigError(f"[{name}] is missing key 'dims'")
        try:
            n_in, n_out = _int_list(sec["dims"], "-")
            enc = Activation.parse(sec.get("enc_act", "tanh"))
            dec = Activation.parse(sec.get("dec_act", "tanh"))
        except ValueError as exc:
            raise ConfigError(f"[{name}]: bad dims or activation: {exc}") from None
        layers.append(LayerConfig(n_in, n_out, _hyperparams(sec, name), enc, dec))
    for prev, cur in zip(layers, layers[1:]):
        if cur.n_in != prev.n_out:
            raise ConfigError(f"layer dims do not chain: {prev.n_out} then {cur.n_in}")

    ft = _hyperparams(parser["finetune"], "finetune") if parser.has_section("finetune") else None

    pre = parser["preprocess"] if parser.has_section("preprocess") else {}
    try:
        cfg = TrainConfig(layers, ft,
                          sample_rate=float(pre.get("sample_rate", "48000")),
                          warp=pre.get("warp", "bark").strip().lower(),
                          headroom=float(pre.get("headroom", "0.95")))
    except ValueError as exc:
        raise ConfigError(f"[preprocess]: {exc}") from None
    if cfg.warp not in ("bark", "none"):
        raise ConfigError(f"[preprocess] warp must be bark or none, got {cfg.warp!r}")

    if parser.has_section("experiment"):
        ex = parser["experiment"]
        try:
            split = tuple(float(v) for v in ex.get("split", "0.8,0.1,0.1").split(","))
            cfg.experiment = ExperimentConfig(
                seeds=_int_list(ex.get("seeds", "1,2,3")),
                split=split,
                k=int(ex["k"]) if "k" in ex else None,
            )
        except ValueError as exc:
            raise ConfigError(f"[experiment]: {exc}") from None
        if len(split) != 3 or any(f < 0 for f in split) or abs(sum(split) - 1) > 1e-9:
            raise ConfigError("[experiment] split must be three fractions summing to 1")
    return cfg


def load_config(path):
    with open(path) as f:
        return parse_config(f.read(), str(path))


def preset(name):
    """Text of a bundled config, e.g. ``preset("paper_dda")``."""
    return resources.files("sbx.configs").joinpath(f"{name}.ini").read_text()
