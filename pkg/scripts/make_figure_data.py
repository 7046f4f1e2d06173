#!/usr/bin/env python3
"""Regenerate every figure dataset into figure_data/ with one call per
preset.  Pass extra CLI flags after the preset name to override defaults,
e.g.  python3 scripts/make_figure_data.py fig4 --tmax 50
"""

import os
import sys
import time

from alphacir.cli import run

PRESETS = ["fig1", "fig2", "fig3", "fig4", "fig5"]


def main() -> int:
    outdir = os.environ.get("FIGURE_DIR", "figure_data")
    os.makedirs(outdir, exist_ok=True)
    os.chdir(outdir)
    targets = [sys.argv[1]] if len(sys.argv) > 1 else PRESETS
    extra = sys.argv[2:]
    for name in targets:
        t0 = time.time()
        code = run([name] + extra)
        print(f"{name}: exit {code} ({time.time() - t0:.1f}s)")
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
