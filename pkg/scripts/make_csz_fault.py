#!/usr/bin/env python3
"""Generate the bundled CSZ-south style sample fault.

Writes a 540-patch (36 along strike x 15 down dip) gently curved thrust
geometry in the local Cartesian fault CSV schema.  The arc and dimensions
are chosen so the down-dip edge reaches 20 km depth and the correlation
lengths 130 km / 40 km equal 40% of the fault length / width.
"""

import csv
import math
import pathlib

ARC_LENGTH = 325.0e3      # total along-strike extent
ARC_RADIUS = 1000.0e3     # radius of the curved trace
WIDTH = 100.0e3           # down-dip extent
TOP_DEPTH = 5.0e3
SIN_DIP = 0.15            # top 5 km + 100 km * 0.15 = 20 km bottom depth
N_STRIKE = 36
N_DIP = 15

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "slipgen" / "data" / "csz_south_fault.csv"


def main():
    dip_deg = math.degrees(math.asin(SIN_DIP))
    cos_dip = math.cos(math.asin(SIN_DIP))
    seg_len = ARC_LENGTH / N_STRIKE
    seg_wid = WIDTH / N_DIP
    rows = []
    for c in range(N_STRIKE):
        t = (c + 0.5) * seg_len
        phi = (t - 0.5 * ARC_LENGTH) / ARC_RADIUS   # tangent azimuth, radians
        trace_x = ARC_RADIUS * (1.0 - math.cos(phi))
        trace_y = ARC_RADIUS * math.sin(phi)
        downdip = (math.cos(phi), -math.sin(phi))
        for r in range(N_DIP):
            w = (r + 0.5) * seg_wid
            rows.append((
                trace_x + w * cos_dip * downdip[0],
                trace_y + w * cos_dip * downdip[1],
                TOP_DEPTH + w * SIN_DIP,
                math.degrees(phi) % 360.0,
                dip_deg,
                90.0,
                seg_len,
                seg_wid,
            ))
    with open(OUT, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_m", "y_m", "depth_m", "strike_deg", "dip_deg",
                         "rake_deg", "length_m", "width_m"])
        for row in rows:
            writer.writerow(["%.6f" % v for v in row])
    print("wrote %d patches to %s" % (len(rows), OUT))


if __name__ == "__main__":
    main()
