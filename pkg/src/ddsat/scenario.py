"""Scenario files: a flat key = value format with dotted sections and one
nesting level for the secondary-node list.

    slots_per_state = 4
    radio.threshold_dbm = -60
    primary.channel = 4
    primary.activity = always_on
    sn.2.traffic = real_time
    sn.2.requested_slots = 4

Unknown keys are errors. RF bench parameters (channel
frequencies, modulation, sampling rate) are accepted as inert metadata so
published configurations stay copy-pasteable.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .core import CCC_CHANNEL
from .nodes import PrimaryActivity


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(ValueError):
    def __init__(self, fld: str, reason: str):
        super().__init__(f"{fld}: {reason}")
        self.field = fld
        self.reason = reason


@dataclass
class SecondaryConfig:
    node_id: int
    traffic: str = "normal"
    requested_slots: int = 4


@dataclass
class PrimaryConfig:
    channel: int
    activity: str = "always_on"  # or "bernoulli:<p>"
    power_dbm: float = -50.0

    @property
    def activity_kind(self) -> PrimaryActivity:
        if self.activity.startswith("bernoulli"):
            return PrimaryActivity.BERNOULLI
        return PrimaryActivity.ALWAYS_ON

    @property
    def p_on(self) -> float:
        if self.activity.startswith("bernoulli:"):
            return float(self.activity.split(":", 1)[1])
        return 1.0


@dataclass
class RadioConfig:
    noise_floor_dbm: float = -90.0
    shadow_sigma_db: float = 0.0
    threshold_dbm: float = -60.0


@dataclass
class ScenarioConfig:
    num_channels: int = 4
    slots_per_state: int = 4
    frames: int = 100
    seed: int = 0
    secondaries: list[SecondaryConfig] = field(default_factory=list)
    primary: PrimaryConfig | None = None
    radio: RadioConfig = field(default_factory=RadioConfig)
    channel_frequencies: list[float] | None = None
    modulation: str | None = None
    sampling_rate_mhz: float | None = None

    @property
    def sensing_channels(self) -> tuple[int, ...]:
        return tuple(ch for ch in range(1, self.num_channels + 1)
                     if ch != CCC_CHANNEL)

    def scenario_hash(self) -> str:
        return hashlib.sha256(render_scenario(self).encode()).hexdigest()[:12]


_INT_KEYS = {"num_channels", "slots_per_state", "frames", "seed"}
_META_KEYS = {"channel_frequencies", "modulation", "sampling_rate_mhz"}
_RADIO_KEYS = {"noise_floor_dbm", "shadow_sigma_db", "threshold_dbm"}
_PRIMARY_KEYS = {"channel", "activity", "power_dbm"}
_SN_KEYS = {"traffic", "requested_slots"}


def parse_scenario(text: str) -> ScenarioConfig:
    cfg = ScenarioConfig()
    sns: dict[int, SecondaryConfig] = {}
    primary_fields: dict[str, str] = {}
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(line_no, "expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in seen:
            raise ValidationError(key, "duplicate assignment")
        seen.add(key)
        try:
            _apply(cfg, sns, primary_fields, key, value)
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ParseError(line_no, f"bad value for {key}: {value}") from exc
    if primary_fields:
        if "channel" not in primary_fields:
            raise ValidationError("primary.channel", "required when any primary.* key is set")
        cfg.primary = PrimaryConfig(
            channel=int(primary_fields["channel"]),
            activity=primary_fields.get("activity", "always_on"),
            power_dbm=float(primary_fields.get("power_dbm", -50.0)),
        )
    cfg.secondaries = [sns[i] for i in sorted(sns)]
    validate_scenario(cfg)
    return cfg


def _apply(cfg: ScenarioConfig, sns, primary_fields, key: str, value: str) -> None:
    if key in _INT_KEYS:
        setattr(cfg, key, int(value))
        return
    if key == "channel_frequencies":
        cfg.channel_frequencies = [float(v) for v in value.split(",") if v.strip()]
        return
    if key == "modulation":
        cfg.modulation = value
        return
    if key == "sampling_rate_mhz":
        cfg.sampling_rate_mhz = float(value)
        return
    parts = key.split(".")
    if parts[0] == "radio" and len(parts) == 2 and parts[1] in _RADIO_KEYS:
        setattr(cfg.radio, parts[1], float(value))
        return
    if parts[0] == "primary" and len(parts) == 2 and parts[1] in _PRIMARY_KEYS:
        primary_fields[parts[1]] = value
        return
    if parts[0] == "sn" and len(parts) == 3 and parts[2] in _SN_KEYS:
        node_id = int(parts[1])
        sn = sns.setdefault(node_id, SecondaryConfig(node_id=node_id))
        if parts[2] == "traffic":
            sn.traffic = value
        else:
            sn.requested_slots = int(value)
        return
    raise ValidationError(key, "unknown key")


def validate_scenario(cfg: ScenarioConfig) -> None:
    if not 2 <= cfg.num_channels <= 8:
        raise ValidationError("num_channels", "must be 2..8")
    if not 1 <= cfg.slots_per_state <= 8:
        raise ValidationError("slots_per_state", "must be 1..8")
    if cfg.frames < 1:
        raise ValidationError("frames", "must be >= 1")
    if len(cfg.secondaries) > cfg.slots_per_state:
        raise ValidationError("sn", "more secondaries than DDSAT slots")
    for sn in cfg.secondaries:
        name = f"sn.{sn.node_id}"
        if not 1 <= sn.node_id <= 254:
            raise ValidationError(name, "id must be 1..254")
        if sn.traffic not in ("normal", "real_time"):
            raise ValidationError(f"{name}.traffic", "must be normal or real_time")
        if not 0 <= sn.requested_slots <= cfg.slots_per_state:
            raise ValidationError(f"{name}.requested_slots",
                                  f"must be 0..{cfg.slots_per_state}")
    if cfg.primary is not None:
        p = cfg.primary
        if p.channel == CCC_CHANNEL:
            raise ValidationError("primary.channel", "the CCC is never occupied by a primary")
        if not 2 <= p.channel <= cfg.num_channels:
            raise ValidationError("primary.channel", f"must be 2..{cfg.num_channels}")
        if p.activity != "always_on" and not p.activity.startswith("bernoulli:"):
            raise ValidationError("primary.activity", "must be always_on or bernoulli:<p>")
        if p.activity.startswith("bernoulli:"):
            try:
                p_on = float(p.activity.split(":", 1)[1])
            except ValueError:
                raise ValidationError("primary.activity", "bad bernoulli probability")
            if not 0.0 <= p_on <= 1.0:
                raise ValidationError("primary.activity", "probability outside [0, 1]")


def render_scenario(cfg: ScenarioConfig) -> str:
    """Canonical text form; parse(render(cfg)) == cfg."""
    lines = [
        f"num_channels = {cfg.num_channels}",
        f"slots_per_state = {cfg.slots_per_state}",
        f"frames = {cfg.frames}",
        f"seed = {cfg.seed}",
        f"radio.noise_floor_dbm = {cfg.radio.noise_floor_dbm:g}",
        f"radio.shadow_sigma_db = {cfg.radio.shadow_sigma_db:g}",
        f"radio.threshold_dbm = {cfg.radio.threshold_dbm:g}",
    ]
    if cfg.channel_frequencies is not None:
        freqs = ", ".join(repr(f) for f in cfg.channel_frequencies)
        lines.append(f"channel_frequencies = {freqs}")
    if cfg.modulation is not None:
        lines.append(f"modulation = {cfg.modulation}")
    if cfg.sampling_rate_mhz is not None:
        lines.append(f"sampling_rate_mhz = {cfg.sampling_rate_mhz:g}")
    if cfg.primary is not None:
        lines.append(f"primary.channel = {cfg.primary.channel}")
        lines.append(f"primary.activity = {cfg.primary.activity}")
        lines.append(f"primary.power_dbm = {cfg.primary.power_dbm:g}")
    for sn in sorted(cfg.secondaries, key=lambda s: s.node_id):
        lines.append(f"sn.{sn.node_id}.traffic = {sn.traffic}")
        lines.append(f"sn.{sn.node_id}.requested_slots = {sn.requested_slots}")
    return "\n".join(lines) + "\n"
