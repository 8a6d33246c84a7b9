"""Render both ducking presets on the same item and compare how much the
background drops relative to the dialogue, while the overall loudness
stays where the original mix was.
"""

import numpy as np

from clearspeech import find_preset, remix, separate_center
from clearspeech.loudness import integrated_loudness
from clearspeech.synthdata import SynthDatasetConfig, synth_dataset

mix, _, _ = synth_dataset(SynthDatasetConfig(
    count=1, duration_s=4.0, seed=7, snr_range_db=(3.0, 3.0)))[0]
stems = separate_center(mix)

mix_lufs = integrated_loudness(mix).integrated
print(f"mix loudness: {mix_lufs:.2f} LUFS")

for name in ("Sprache betont", "Sprache stärker betont"):
    preset = find_preset(name)
    out, report = remix(stems, preset)
    out_lufs = integrated_loudness(out).integrated
    p = preset.params
    print(f"\n{name}:")
    print(f"  attenuation {p.global_atten_db:.0f} dB outside speech, "
          f"+{p.duck_extra_db:.0f} dB extra during speech")
    print(f"  makeup gain {report.makeup_db:+.2f} dB")
    print(f"  output loudness {out_lufs:.2f} LUFS "
          f"(delta {out_lufs - mix_lufs:+.2f} LU)")
