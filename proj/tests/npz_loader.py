"""Loads generated instances with numpy to check loader compatibility."""
import json
import pathlib
import subprocess
import sys
import tempfile

import numpy as np


def main(binary: str) -> int:
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp) / "corpus"
        subprocess.run([binary, "generate", "--dataset", "mesh", "--n", "35", "--seed", "3",
                        "--out", str(out)], check=True, stdout=subprocess.DEVNULL)
        files = sorted(out.glob("*/RAVEN_*.npz"))
        assert len(files) == 35, len(files)
        for f in files:
            with np.load(f) as z:
                image, target, rules = z["image"], z["target"], z["rules"]
                assert image.shape == (16, 80, 80) and image.dtype == np.uint8
                assert target.shape == () and target.dtype == np.int64 and 0 <= int(target) < 8
                assert rules.shape == (48,) and rules.dtype == np.uint8
                meta = json.loads(bytes(z["meta"]))
                assert meta["dataset"] == "mesh"
                assert f.name == f"RAVEN_{meta['id']}_{meta['split']}.npz"
                assert int(rules.sum()) == len(meta["assignments"])
    print("numpy loader ok")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
