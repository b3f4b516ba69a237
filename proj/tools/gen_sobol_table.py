#!/usr/bin/env python3
"""Regenerates src/sobol_direction_numbers.cpp from the Joe-Kuo
new-joe-kuo-6.21201 direction numbers (as shipped with scipy)."""
import os
import sys

import numpy as np
import scipy

npz = os.path.join(os.path.dirname(scipy.__file__), "stats", "_sobol_direction_numbers.npz")
data = np.load(npz)
poly, vinit = data["poly"], data["vinit"]

out = sys.argv[1] if len(sys.argv) > 1 else "src/sobol_direction_numbers.cpp"
with open(out, "w") as f:
    f.write("// Generated by tools/gen_sobol_table.py from the Joe-Kuo new-joe-kuo-6.21201 table.\n")
    f.write("// Do not edit.\n\n#include \"walker/sobol.hpp\"\n\nnamespace walker::detail {\n\n")
    f.write(f"const SobolPrimitive kSobolTable[{len(poly)}] = {{\n")
    for p, v in zip(poly, vinit):
        degree = int(p).bit_length() - 1
        m = ",".join(str(int(x)) for x in v[: max(degree, 1)])
        f.write(f"{{{int(p)},{{{m}}}}},\n")
    f.write("};\n\n}  // namespace walker::detail\n")
