"""Paired-dataset builder: reality images and their extracted sketches.

Each input image is resized to the training resolution, smoothed,
converted to grayscale, and run through the pencil-stroke extractor. The
resulting (reality, sketch) pair is written to disk and described by one
JSON Lines record in the manifest.
"""

import dataclasses
import hashlib
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor

from .imgio import load_image, resize, save_image, to_grayscale
from .pencil import SketchParams, pencil_sketch
from .smooth import L0Params, grad_count, l0_smooth

__all__ = [
    "PairRecord",
    "params_digest",
    "extract_pair",
    "build_dataset",
    "write_manifest",
    "read_manifest",
    "MANIFEST_NAME",
]

log = logging.getLogger(__name__)

MANIFEST_NAME = "pairs.jsonl"
_SUPPORTED = (".png", ".pgm", ".ppm")


@dataclasses.dataclass(frozen=True)
class PairRecord:
    id: str
    reality_path: str
    sketch_path: str
    width: int
    height: int
    params_digest: str


def params_digest(l0p, sp):
    """Stable hash of the smoothing and sketch parameters."""
    payload = json.dumps(
        {"l0": dataclasses.asdict(l0p), "sketch": dataclasses.asdict(sp)},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def extract_pair(r, l0p, sp, target):
    """Resize to target x target, then smooth and extract the sketch."""
    reality = resize(r, target, target)
    sketch = pencil_sketch(to_grayscale(l0_smooth(reality, l0p)), sp)
    return sketch, reality


def write_manifest(records, path):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(dataclasses.asdict(rec), sort_keys=True) + "\n")


def read_manifest(path):
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(PairRecord(**json.loads(line)))
    return records


def _default_workers():
    env = os.environ.get("LINEARTIST_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def build_dataset(
    in_dir,
    out_dir,
    l0p=L0Params(),
    sp=SketchParams(),
    target=256,
    max_gradcount=None,
    workers=None,
):
    """Process every supported image in in_dir; return the manifest records.

    Images whose smoothed grayscale has more than max_gradcount active
    gradient pixels per pixel are skipped (too busy for a freehand-style
    sketch). Records are sorted by filename so output is independent of
    scheduling.
    """
    names = sorted(
        n
        for n in os.listdir(in_dir)
        if os.path.splitext(n)[1].lower() in _SUPPORTED
    )
    if not names:
        raise ValueError(f"no supported images in {in_dir}")
    os.makedirs(out_dir, exist_ok=True)
    sketch_dir = os.path.join(out_dir, "sketches")
    reality_dir = os.path.join(out_dir, "reality")
    os.makedirs(sketch_dir, exist_ok=True)
    os.makedirs(reality_dir, exist_ok=True)
    digest = params_digest(l0p, sp)

    def process(name):
        r = load_image(os.path.join(in_dir, name))
        reality = resize(r, target, target)
        smooth_gray = to_grayscale(l0_smooth(reality, l0p))
        if max_gradcount is not None:
            density = grad_count(smooth_gray) / float(target * target)
            if density > max_gradcount:
                log.info("skipping %s: gradient density %.4f", name, density)
                return None
        sketch = pencil_sketch(smooth_gray, sp)
        stem = os.path.splitext(name)[0]
        sketch_path = os.path.join(sketch_dir, stem + ".png")
        reality_path = os.path.join(reality_dir, stem + ".png")
        save_image(sketch, sketch_path)
        save_image(reality, reality_path)
        return PairRecord(
            id=stem,
            reality_path=os.path.relpath(reality_path, out_dir),
            sketch_path=os.path.relpath(sketch_path, out_dir),
            width=target,
            height=target,
            params_digest=digest,
        )

    workers = workers or _default_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(process, names))
    else:
        results = [process(n) for n in names]
    records = [r for r in results if r is not None]
    write_manifest(records, os.path.join(out_dir, MANIFEST_NAME))
    return records
