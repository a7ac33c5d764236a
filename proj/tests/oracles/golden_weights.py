#!/usr/bin/env python3
# Writes tests/data/golden_v1.npw from first principles (struct + zlib), with
# no code shared with the C++ reader. The network is [d] = (2, 3, 1), PReLU.
import os
import struct
import zlib

LAYERS = [
    # (weight rows, bias, slopes or None)
    ([[0.5, -1.25], [1.0 / 3.0, 2.0 ** -30], [-0.0, 1e300]],
     [0.125, -7.0, 3.141592653589793],
     [0.25, 1.0, -0.5]),
    ([[1.5, -2.5, 5e-324]],
     [-1.0],
     None),
]


def encode():
    out = bytearray(b"NPW1")
    out += struct.pack("<IBI", 1, 0, len(LAYERS))
    for weight, bias, slopes in LAYERS:
        d_out, d_in = len(weight), len(weight[0])
        out += struct.pack("<IIB", d_in, d_out, 0 if slopes is None else 1)
        for row in weight:
            out += struct.pack("<%dd" % d_in, *row)
        out += struct.pack("<%dd" % d_out, *bias)
        if slopes is not None:
            out += struct.pack("<%dd" % d_out, *slopes)
    out += struct.pack("<I", zlib.crc32(bytes(out)) & 0xFFFFFFFF)
    return bytes(out)


if __name__ == "__main__":
    path = os.path.join(os.path.dirname(__file__), "..", "data", "golden_v1.npw")
    data = encode()
    with open(path, "wb") as f:
        f.write(data)
    print(len(data), "bytes, crc32 %08x" % struct.unpack("<I", data[-4:]))
