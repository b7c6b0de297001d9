#!/usr/bin/env python3
"""Regenerates the Sobol direction-number block of src/qmc_tables.cpp.

Extracts the first 1024 dimensions of the Joe--Kuo "new-joe-kuo-6.21201"
table from SciPy's packaged copy (scipy/stats/_sobol_direction_numbers.npz)
and emits them as C++ arrays.  Dimension 1 is the van der Corput dimension
(all initial direction integers equal 1) and is implicit; the arrays cover
dimensions 2..1024.

Run from the repository root:
    python3 tools/gen/make_sobol_table.py > /tmp/sobol_block.cpp
"""

import os
import sys

import numpy as np
import scipy.stats._sobol as _sobol

DIMS = 1024  # table covers dimensions 1..DIMS; arrays hold dims 2..DIMS


def main() -> None:
    path = os.path.join(os.path.dirname(_sobol.__file__),
                        "_sobol_direction_numbers.npz")
    data = np.load(path)
    poly = data["poly"]    # primitive polynomial bit encodings, row i = dim i+1
    vinit = data["vinit"]  # initial direction integers m_1..m_deg per row

    rows = []
    mflat = []
    for i in range(1, DIMS):  # rows for dimensions 2..DIMS
        p = int(poly[i])
        deg = p.bit_length() - 1
        m = [int(v) for v in vinit[i][:deg]]
        assert all(mk % 2 == 1 for mk in m), f"even m at dim {i + 1}"
        assert all(mk < (1 << (k + 1)) for k, mk in enumerate(m)), \
            f"m_k out of range at dim {i + 1}"
        rows.append(p)
        mflat.extend(m)

    def emit_array(name, ctype, values, per_line=18):
        print(f"const {ctype} {name}[{len(values)}] = {{")
        for start in range(0, len(values), per_line):
            chunk = ", ".join(str(v) for v in values[start:start + per_line])
            print(f"    {chunk},")
        print("};")

    print(f"// Generated by tools/gen/make_sobol_table.py; {len(mflat)} "
          f"initial direction integers for dimensions 2..{DIMS}.")
    emit_array("kSobolPoly", "std::uint32_t", rows)
    emit_array("kSobolMInit", "std::uint32_t", mflat)
    print(f"// total m values: {len(mflat)}", file=sys.stderr)


if __name__ == "__main__":
    main()
