# Change points in a stack of images
#
# Each frame is an 8-bit greyscale image written as binary PGM.  Halfway
# through, the noise level of the images jumps.  The detector treats every
# frame as one bag of pixel values, so image size and layout do not matter.

import os
import subprocess
import sys
import tempfile

import numpy as np

from reamp.ingest import load_frame_directory
from reamp.pipeline import PipelineConfig, detect_sequence
from reamp.sharpen import SharpenConfig

rng = np.random.default_rng(0)
folder = tempfile.mkdtemp(prefix="frames_")
for k in range(30):
    spread = 15 if k < 18 else 45
    pixels = np.clip(rng.normal(128, spread, (32, 32)), 0, 255).astype(np.uint8)
    with open(os.path.join(folder, f"frame_{k:03d}.pgm"), "wb") as fh:
        fh.write(b"P5\n32 32\n255\n" + pixels.tobytes())

seq = load_frame_directory(folder, "pgm")
print("frames:", seq.n, "shape:", seq.shape)

report = detect_sequence(seq, PipelineConfig(sharpen=SharpenConfig(nb2=27)))
print("estimates:", report.estimates.estimates, "(noise changes after frame 18)")

# The same run from the command line writes a JSON report.

out = subprocess.run([sys.executable, "-m", "reamp", "detect", folder, "--format", "pgm",
                      "--nb2", "27", "--output-format", "csv"],
                     capture_output=True, text=True)
print(out.stdout.strip())
