import numpy as np
import pytest

from clearspeech.audio_io import AudioBuffer, read_wav
from clearspeech.delivery import (AdmDocument, AdmObject,
                                  ChannelReferenceError, GainBounds,
                                  LoudnessValueError, SchemaViolationError,
                                  document_to_xml, export_package,
                                  parse_package, read_manifest,
                                  render_enhanced_track, xml_to_document)
from clearspeech.remix import find_preset
from clearspeech.separation import StemPair
from clearspeech.synthdata import SynthDatasetConfig, synth_dataset


@pytest.fixture
def stems():
    mix, dialogue, background = synth_dataset(SynthDatasetConfig(
        count=1, duration_s=3.0, seed=11, snr_range_db=(3.0, 3.0)))[0]
    return StemPair(dialogue, background, mix.length)


def test_bounds_validation():
    with pytest.raises(ValueError):
        GainBounds(min_db=1.0, max_db=12.0)
    with pytest.raises(ValueError):
        GainBounds(min_db=-6.0, max_db=-1.0)


def test_export_produces_two_objects(stems, tmp_path):
    wav_path, xml_path = export_package(stems, tmp_path)
    doc = xml_to_document(xml_path.read_bytes())
    doc.validate(package_channels=4)
    roles = sorted(o.role for o in doc.objects)
    assert roles == ["background", "dialogue"]


def test_round_trip_bit_exact(stems, tmp_path):
    wav_path, xml_path = export_package(stems, tmp_path)
    loaded, doc = parse_package(wav_path, xml_path)
    f32 = lambda a: a.astype(np.float32)
    assert np.array_equal(loaded.dialogue.samples,
                          f32(stems.dialogue.samples))
    assert np.array_equal(loaded.background.samples,
                          f32(stems.background.samples))


def test_metadata_round_trip_exact(stems, tmp_path):
    bounds = GainBounds(min_db=-6.0, max_db=12.0)
    wav_path, xml_path = export_package(stems, tmp_path, bounds,
                                        programme_name="Tatort 1187")
    _, doc = parse_package(wav_path, xml_path)
    assert doc.programme_name == "Tatort 1187"
    assert doc.bounds.min_db == -6.0
    assert doc.bounds.max_db == 12.0
    from clearspeech.loudness import integrated_loudness
    d = doc.object_by_role("dialogue")
    assert d.loudness_lufs == integrated_loudness(stems.dialogue).integrated


def test_bounds_pass_through_verbatim(stems, tmp_path):
    _, xml_path = export_package(stems, tmp_path,
                                 GainBounds(min_db=-6.0, max_db=12.0))
    text = xml_path.read_text()
    assert 'gainMinDb="-6.0"' in text
    assert 'gainMaxDb="12.0"' in text


def test_missing_background_object(stems, tmp_path):
    wav_path, xml_path = export_package(stems, tmp_path)
    import re
    text = xml_path.read_text()
    text = re.sub(r'<audioObject audioObjectID="obj_background".*?'
                  r'</audioObject>', "", text, flags=re.S)
    xml_path.write_text(text)
    with pytest.raises(SchemaViolationError, match="background"):
        parse_package(wav_path, xml_path)


def test_channel_reference_out_of_range(stems, tmp_path):
    wav_path, xml_path = export_package(stems, tmp_path)
    text = xml_path.read_text().replace('channels="2 3"', 'channels="2 7"')
    xml_path.write_text(text)
    with pytest.raises(ChannelReferenceError):
        parse_package(wav_path, xml_path)


def test_non_numeric_loudness(stems, tmp_path):
    wav_path, xml_path = export_package(stems, tmp_path)
    doc = xml_to_document(xml_path.read_bytes())
    text = xml_path.read_text().replace(
        f"<integratedLoudness>{doc.mix_loudness_lufs!r}</integratedLoudness>",
        "<integratedLoudness>loud</integratedLoudness>", 1)
    xml_path.write_text(text)
    with pytest.raises(LoudnessValueError):
        parse_package(wav_path, xml_path)


def test_not_xml():
    with pytest.raises(SchemaViolationError):
        xml_to_document(b"not xml at all")


def test_wrong_root():
    with pytest.raises(SchemaViolationError, match="root"):
        xml_to_document(b"<wrong/>")


def test_document_invariants():
    doc = AdmDocument("p", [AdmObject("a", "dialogue", (0, 1), -20.0),
                            AdmObject("b", "dialogue", (2, 3), -25.0)],
                      GainBounds(), -18.0)
    with pytest.raises(SchemaViolationError):
        doc.validate()


def test_render_identity_preset(stems, tmp_path):
    from clearspeech.remix import Preset, RemixParams
    identity = Preset("identity", RemixParams(global_atten_db=0.0,
                                              duck_extra_db=0.0))
    out_path, manifest_path, report = render_enhanced_track(
        stems, identity, tmp_path / "out.wav")
    rendered = read_wav(out_path)
    mix = stems.mix()
    rel = np.linalg.norm(rendered.samples - mix.samples.astype(np.float32)) \
        / np.linalg.norm(mix.samples)
    assert rel < 1e-6


def test_render_manifest_loudness_delta(stems, tmp_path):
    out_path, manifest_path, report = render_enhanced_track(
        stems, find_preset("Sprache betont"), tmp_path / "out.wav")
    manifest = read_manifest(manifest_path)
    delta = abs(manifest["loudness_out_lufs"] - manifest["loudness_mix_lufs"])
    assert delta <= 0.5
    assert manifest["preset"] == "Sprache betont"
    assert isinstance(manifest["clipped_samples"], int)


def test_manifest_round_trip(stems, tmp_path):
    from clearspeech.delivery import write_manifest
    out_path, manifest_path, _ = render_enhanced_track(
        stems, find_preset("Sprache betont"), tmp_path / "out.wav")
    manifest = read_manifest(manifest_path)
    write_manifest(manifest, tmp_path / "again.json")
    assert read_manifest(tmp_path / "again.json") == manifest
