"""JSON configuration loading, validation and serialization."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict
from importlib import resources

from .errors import ConfigError
from .model import (
    SPEED_OF_LIGHT,
    CommParams,
    Device,
    EnergyParams,
    Geometry,
    RfParams,
    SystemConfig,
    dbm_to_watts,
)

_SECTIONS = {
    "geometry": (("waveguide_length_m", "waveguide_height_m", "area_x_m", "area_y_m"), ()),
    "rf": (("carrier_hz", "blockage_beta"), ("lightspeed_m_s",)),
    "energy": (("tx_power_w", "conversion_eff", "capacitor_j", "slot_s"), ()),
}
_DEVICE_FIELDS = (("x_m", "y_m"), ("weight",))
_COMM_FIELDS = ("bandwidth_hz", "packet_bits")


def _number(value, where, problems):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{where} must be a number (got {value!r})")
        return math.nan
    return float(value)


def _section(data, name, required, optional, problems):
    block = data.get(name)
    if not isinstance(block, dict):
        problems.append(f"{name} must be an object")
        return None
    out = {}
    for key in required:
        if key not in block:
            problems.append(f"{name}.{key} is required")
        else:
            out[key] = _number(block[key], f"{name}.{key}", problems)
    for key in optional:
        if key in block:
            out[key] = _number(block[key], f"{name}.{key}", problems)
    allowed = set(required) | set(optional)
    for key in sorted(set(block) - allowed):
        problems.append(f"{name}.{key} is not a recognised field")
    return out


def config_from_dict(data):
    """Build a validated SystemConfig, reporting every problem found."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    problems = []
    for key in sorted(set(data) - {"geometry", "devices", "rf", "energy", "comm"}):
        problems.append(f"{key} is not a recognised section")

    parts = {}
    for name, (required, optional) in _SECTIONS.items():
        fields = _section(data, name, required, optional, problems)
        if fields is not None:
            parts[name] = fields

    comm = data.get("comm")
    comm_fields = None
    if isinstance(comm, dict):
        noise_keys = [k for k in ("noise_w", "noise_dbm") if k in comm]
        if len(noise_keys) != 1:
            problems.append("comm needs exactly one of noise_w or noise_dbm")
        comm_fields = _section(data, "comm", _COMM_FIELDS, noise_keys, problems)
        if "noise_dbm" in comm_fields:
            comm_fields["noise_w"] = dbm_to_watts(comm_fields.pop("noise_dbm"))
    else:
        problems.append("comm must be an object")

    devices = []
    raw_devices = data.get("devices")
    if not isinstance(raw_devices, list):
        problems.append("devices must be a list")
    else:
        for i, raw in enumerate(raw_devices):
            fields = _section({f"devices[{i}]": raw}, f"devices[{i}]", *_DEVICE_FIELDS, problems)
            if fields is not None and {"x_m", "y_m"} <= set(fields):
                devices.append(Device(**fields))

    if problems:
        raise ConfigError(problems)
    return SystemConfig(
        geometry=Geometry(**parts["geometry"]),
        devices=devices,
        rf=RfParams(**{"lightspeed_m_s": SPEED_OF_LIGHT, **parts["rf"]}),
        energy=EnergyParams(**parts["energy"]),
        comm=CommParams(**comm_fields),
    )


def config_to_dict(config):
    return {
        "geometry": asdict(config.geometry),
        "devices": [asdict(d) for d in config.devices],
        "rf": asdict(config.rf),
        "energy": asdict(config.energy),
        "comm": asdict(config.comm),
    }


def dumps_config(config):
    return json.dumps(config_to_dict(config), indent=2) + "\n"


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read configuration ({exc.strerror})") from exc
    return config_from_dict(data)


def save_config(config, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(config))


def default_config():
    text = resources.files("pinch_aoi").joinpath("data/default_config.json").read_text("utf-8")
    return config_from_dict(json.loads(text))


def config_digest(config):
    canonical = json.dumps(config_to_dict(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
