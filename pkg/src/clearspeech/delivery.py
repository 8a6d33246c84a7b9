"""Output packaging: the object-style stem package and the enhanced track.

The package is a 4-channel float32 WAV (dialogue L/R, background L/R)
plus a sidecar XML whose element vocabulary mirrors the Audio Definition
Model (audioProgramme / audioObject / audioTrackUID) at the subset this
pipeline actually produces: exactly one dialogue and one background
object, broadcaster gain bounds, and measured loudness. See
docs/package_schema.md for the documented schema.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer, read_wav, write_wav
from .loudness import integrated_loudness
from .remix import Preset, RemixReport, remix
from .separation import StemPair

SCHEMA_VERSION = "1"


class PackageError(Exception):
    pass


class SchemaViolationError(PackageError):
    """Missing/duplicated/unknown element or attribute, with location."""


class ChannelReferenceError(PackageError):
    """An object references a channel the package audio does not have."""


class LoudnessValueError(PackageError):
    """A loudness field is present but not numeric."""


@dataclass(frozen=True)
class GainBounds:
    min_db: float = -6.0
    max_db: float = 12.0

    def __post_init__(self):
        if not (self.min_db <= 0.0 <= self.max_db):
            raise ValueError("gain bounds must bracket 0 dB")


@dataclass
class AdmObject:
    object_id: str
    role: str                  # "dialogue" | "background"
    channels: tuple            # indices into the package WAV
    loudness_lufs: float | None


@dataclass
class AdmDocument:
    programme_name: str
    objects: list
    bounds: GainBounds
    mix_loudness_lufs: float | None

    def validate(self, package_channels: int | None = None) -> None:
        roles = sorted(o.role for o in self.objects)
        if roles != ["background", "dialogue"]:
            raise SchemaViolationError(
                f"need exactly one dialogue and one background object, "
                f"got roles {roles}")
        if package_channels is not None:
            for obj in self.objects:
                for ch in obj.channels:
                    if not 0 <= ch < package_channels:
                        raise ChannelReferenceError(
                            f"object {obj.object_id!r} references channel "
                            f"{ch} of a {package_channels}-channel file")

    def object_by_role(self, role: str) -> AdmObject:
        for o in self.objects:
            if o.role == role:
                return o
        raise SchemaViolationError(f"no object with role {role!r}")


def _loudness_or_none(buf: AudioBuffer) -> float | None:
    return integrated_loudness(buf).integrated


def document_to_xml(doc: AdmDocument) -> bytes:
    root = ET.Element("stemPackage", version=SCHEMA_VERSION)
    prog = ET.SubElement(root, "audioProgramme",
                         audioProgrammeName=doc.programme_name)
    mix = ET.SubElement(prog, "integratedLoudness")
    mix.text = "none" if doc.mix_loudness_lufs is None \
        else repr(doc.mix_loudness_lufs)
    inter = ET.SubElement(prog, "interactivityBounds")
    inter.set("gainMinDb", repr(doc.bounds.min_db))
    inter.set("gainMaxDb", repr(doc.bounds.max_db))
    for obj in doc.objects:
        el = ET.SubElement(root, "audioObject", audioObjectID=obj.object_id,
                           role=obj.role)
        track = ET.SubElement(el, "audioTrackUID")
        track.set("channels", " ".join(str(c) for c in obj.channels))
        loud = ET.SubElement(el, "integratedLoudness")
        loud.text = "none" if obj.loudness_lufs is None \
            else repr(obj.loudness_lufs)
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def _parse_loudness(el, where: str) -> float | None:
    if el is None:
        raise SchemaViolationError(f"missing integratedLoudness in {where}")
    text = (el.text or "").strip()
    if text == "none":
        return None
    try:
        return float(text)
    except ValueError:
        raise LoudnessValueError(
            f"non-numeric loudness {text!r} in {where}") from None


def xml_to_document(data: bytes) -> AdmDocument:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise SchemaViolationError(f"not well-formed XML: {exc}") from None
    if root.tag != "stemPackage":
        raise SchemaViolationError(f"root element is {root.tag!r}, "
                                   "expected 'stemPackage'")
    if root.get("version") != SCHEMA_VERSION:
        raise SchemaViolationError(
            f"unsupported schema version {root.get('version')!r}")
    prog = root.find("audioProgramme")
    if prog is None:
        raise SchemaViolationError("missing audioProgramme element")
    name = prog.get("audioProgrammeName")
    if name is None:
        raise SchemaViolationError("audioProgramme lacks audioProgrammeName")
    mix_loudness = _parse_loudness(prog.find("integratedLoudness"),
                                   "audioProgramme")
    inter = prog.find("interactivityBounds")
    if inter is None:
        raise SchemaViolationError("missing interactivityBounds element")
    try:
        bounds = GainBounds(float(inter.get("gainMinDb")),
                            float(inter.get("gainMaxDb")))
    except (TypeError, ValueError) as exc:
        raise SchemaViolationError(f"bad interactivityBounds: {exc}") from None

    objects = []
    for el in root.findall("audioObject"):
        oid, role = el.get("audioObjectID"), el.get("role")
        if oid is None or role not in ("dialogue", "background"):
            raise SchemaViolationError(
                f"audioObject needs audioObjectID and a dialogue/background "
                f"role, got id={oid!r} role={role!r}")
        track = el.find("audioTrackUID")
        if track is None or track.get("channels") is None:
            raise SchemaViolationError(
                f"audioObject {oid!r} lacks audioTrackUID channels")
        channels = tuple(int(c) for c in track.get("channels").split())
        loudness = _parse_loudness(el.find("integratedLoudness"),
                                   f"audioObject {oid!r}")
        objects.append(AdmObject(oid, role, channels, loudness))
    doc = AdmDocument(name, objects, bounds, mix_loudness)
    doc.validate()
    return doc


def export_package(stems: StemPair, out_dir,
                   bounds: GainBounds = GainBounds(),
                   programme_name: str = "programme"):
    """Write stems.wav (4ch float32) + package.xml; returns the two paths."""
    if stems.dialogue.channels != 2:
        raise ValueError("package expects stereo stems")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    wav_path = out_dir / "stems.wav"
    xml_path = out_dir / "package.xml"

    audio = np.vstack([stems.dialogue.samples, stems.background.samples])
    write_wav(AudioBuffer(audio, stems.sample_rate), wav_path, "float32")

    doc = AdmDocument(
        programme_name=programme_name,
        objects=[
            AdmObject("obj_dialogue", "dialogue", (0, 1),
                      _loudness_or_none(stems.dialogue)),
            AdmObject("obj_background", "background", (2, 3),
                      _loudness_or_none(stems.background)),
        ],
        bounds=bounds,
        mix_loudness_lufs=_loudness_or_none(stems.mix()))
    doc.validate(package_channels=4)
    xml_path.write_bytes(document_to_xml(doc))
    return wav_path, xml_path


def parse_package(wav_path, xml_path):
    """Load and re-validate a package; returns (StemPair, AdmDocument)."""
    doc = xml_to_document(Path(xml_path).read_bytes())
    audio = read_wav(wav_path)
    doc.validate(package_channels=audio.channels)
    d = doc.object_by_role("dialogue")
    b = doc.object_by_role("background")
    dialogue = AudioBuffer(audio.samples[list(d.channels)], audio.sample_rate)
    background = AudioBuffer(audio.samples[list(b.channels)], audio.sample_rate)
    return StemPair(dialogue, background, dialogue.length), doc


def report_to_manifest(report: RemixReport, artifacts: dict) -> dict:
    """Manifest body; deliberately timestamp-free so runs are byte-identical."""
    return {
        "manifest_version": 1,
        "preset": report.preset_name,
        "loudness_mix_lufs": report.loudness_mix,
        "loudness_raw_lufs": report.loudness_raw,
        "loudness_out_lufs": report.loudness_out,
        "makeup_gain_db": report.makeup_db,
        "clipped_samples": report.clipped_samples,
        "artifacts": artifacts,
    }


def write_manifest(manifest: dict, path) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, ensure_ascii=False,
                                     sort_keys=True) + "\n", encoding="utf-8")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def render_enhanced_track(stems: StemPair, preset: Preset, out_path,
                          bit_depth="float32"):
    """Remix with the preset, write the stereo track + JSON manifest."""
    out_path = Path(out_path)
    out, report = remix(stems, preset)
    write_wav(out, out_path, bit_depth)
    manifest_path = out_path.with_suffix(".manifest.json")
    manifest = report_to_manifest(report, {"enhanced_track": out_path.name})
    write_manifest(manifest, manifest_path)
    return out_path, manifest_path, report
