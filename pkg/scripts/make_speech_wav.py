#!/usr/bin/env python3
"""Generate a speech-like test WAV (mono 16-bit PCM).

No recorded speech ships with this project; this produces an
amplitude-modulated noise signal with a syllabic-rate envelope so the
`input = wav` path can be exercised end to end, e.g.:

    python scripts/make_speech_wav.py --out speechlike.wav --seconds 10
    apsabench --config my_wav_run.cfg --out results/
"""

import argparse
from pathlib import Path

from apsabench.audio import save_wav
from apsabench.signals import SeededStream, speech_like


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("speechlike.wav"))
    parser.add_argument("--seconds", type=float, default=10.0)
    parser.add_argument("--rate", type=int, default=8000)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    count = int(args.seconds * args.rate)
    samples = speech_like(count, SeededStream(args.seed, 9))
    save_wav(samples, args.out, sample_rate=args.rate)
    print(f"wrote {args.out} ({count} samples at {args.rate} Hz)")


if __name__ == "__main__":
    main()
