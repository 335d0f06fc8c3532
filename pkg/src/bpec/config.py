"""Channel configuration files.

A config is a JSON object holding either an explicit chain::

    {"states": ["A", "B"],
     "transition": [[0.9, 0.1], [0.2, 0.8]],
     "erasure": {"A": {"e00": 1, "e01": 0, "e10": 0, "e11": 0}, "B": {...}}}

or a Gilbert-Elliott product chain::

    {"gilbert_elliott": {"b1": 0.2, "g1": 0.2, "b2": 0.3, "g2": 0.3}}

The Gilbert-Elliott block may give ``eps1``/``eps2`` (long-run erasure
probabilities) in place of ``b1``/``b2``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .channel import ChannelError, ChannelModel, GilbertElliottParams, from_gilbert_elliott


class ConfigError(ValueError):
    pass


def channel_from_obj(obj) -> ChannelModel:
    if not isinstance(obj, dict):
        raise ConfigError("channel config must be a JSON object")
    has_explicit = "transition" in obj or "erasure" in obj
    has_ge = "gilbert_elliott" in obj
    if has_explicit == has_ge:
        raise ConfigError('exactly one of "transition"/"erasure" or "gilbert_elliott" must be present')
    try:
        if has_ge:
            return from_gilbert_elliott(_ge_params(obj["gilbert_elliott"]))
        for key in ("states", "transition", "erasure"):
            if key not in obj:
                raise ConfigError(f'missing key "{key}"')
        if not isinstance(obj["erasure"], dict):
            raise ConfigError('"erasure" must map state labels to pmf objects')
        return ChannelModel.from_dict(obj["states"], obj["transition"], obj["erasure"])
    except ChannelError as exc:
        raise ConfigError(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed channel config: {exc}") from exc


def _ge_params(ge) -> GilbertElliottParams:
    if not isinstance(ge, dict):
        raise ConfigError('"gilbert_elliott" must be an object')
    try:
        if "b1" in ge or "b2" in ge:
            return GilbertElliottParams(float(ge["b1"]), float(ge["g1"]), float(ge["b2"]), float(ge["g2"]))
        return GilbertElliottParams.from_average(float(ge["eps1"]), float(ge["g1"]), float(ge["eps2"]), float(ge["g2"]))
    except KeyError as exc:
        raise ConfigError(f"gilbert_elliott: missing key {exc.args[0]!r}") from None


def load_channel(path: str | Path) -> ChannelModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return channel_from_obj(obj)
