"""Write the spectral and temporal intensity profiles of a comb preset to CSV.

    python scripts/comb_profiles.py --preset fig1 --out profiles/
"""
import argparse
import warnings
from pathlib import Path

import numpy as np

from comb_hom.config import preset_config
from comb_hom.hom import default_grid
from comb_hom.sampling import TruncationWarning, dft_to_conjugate
from comb_hom.states import CombSpec, build_comb_temporal


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", default="fig1")
    ap.add_argument("--out", default="profiles")
    ap.add_argument("--periods", type=float, default=3.0, help="time window in periods")
    args = ap.parse_args()

    spec = preset_config(args.preset).state()
    if not isinstance(spec, CombSpec):
        ap.error("profiles are only defined for comb presets")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        wf_t = build_comb_temporal(spec, default_grid(spec))
    wf_w = dft_to_conjugate(wf_t)

    t, a = wf_t.points, np.abs(wf_t.amplitudes) ** 2
    keep = np.abs(t) <= args.periods * spec.period
    np.savetxt(out / f"{args.preset}_time.csv", np.c_[t[keep], a[keep]], delimiter=",",
               header="t,intensity", comments="", fmt="%.17g")

    w, s = wf_w.points, np.abs(wf_w.amplitudes) ** 2
    keep = s > 1e-12 * s.max()
    np.savetxt(out / f"{args.preset}_spectrum.csv", np.c_[w[keep], s[keep]], delimiter=",",
               header="omega,intensity", comments="", fmt="%.17g")
    print(f"wrote {out}/{args.preset}_time.csv and {args.preset}_spectrum.csv")


if __name__ == "__main__":
    main()
