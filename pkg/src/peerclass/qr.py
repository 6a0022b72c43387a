"""Minimal QR code encoder: byte mode, error-correction level L, mask 0.

Covers symbol versions 1-5 (single error-correction block, up to 106
payload bytes), which is plenty for a signup URL. Returns the module
matrix as a list of rows of 0/1; rendering to pixels is left to callers.
"""
from __future__ import annotations

from .errors import ValidationError

# data codewords / EC codewords per version at level L (single block)
_VERSIONS = {1: (19, 7), 2: (34, 10), 3: (55, 15), 4: (80, 20), 5: (108, 26)}

_ALIGNMENT = {1: [], 2: [6, 18], 3: [6, 22], 4: [6, 26], 5: [6, 30]}

_PAD = (0xEC, 0x11)

# GF(256) tables, primitive polynomial x^8+x^4+x^3+x^2+1
_EXP = [0] * 512
_LOG = [0] * 256
_x = 1
for _i in range(255):
    _EXP[_i] = _x
    _LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= 0x11D
for _i in range(255, 512):
    _EXP[_i] = _EXP[_i - 255]


def _gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def _rs_generator(degree: int) -> list[int]:
    poly = [1]
    for i in range(degree):
        nxt = [0] * (len(poly) + 1)
        for j, c in enumerate(poly):
            nxt[j] ^= _gf_mul(c, _EXP[i])
            nxt[j + 1] ^= c
        poly = nxt
    return poly


def _rs_remainder(data: list[int], degree: int) -> list[int]:
    gen = _rs_generator(degree)[::-1]  # leading coefficient first
    rem = [0] * degree
    for byte in data:
        factor = byte ^ rem[0]
        rem = rem[1:] + [0]
        for j, g in enumerate(gen[1:]):
            rem[j] ^= _gf_mul(g, factor)
    return rem


def _format_bits(mask: int) -> int:
    # level L = 0b01
    data = (0b01 << 3) | mask
    rem = data << 10
    gen = 0b10100110111
    for i in range(4, -1, -1):
        if rem & (1 << (i + 10)):
            rem ^= gen << i
    return ((data << 10) | rem) ^ 0b101010000010010


def encode_qr(payload: str) -> list[list[int]]:
    raw = payload.encode("utf-8")
    version = None
    for v, (cap, _ec) in _VERSIONS.items():
        if len(raw) + 2 <= cap:  # mode nibble + 8-bit count + terminator fit
            version = v
            break
    if version is None:
        raise ValidationError(f"payload too long for QR versions 1-5: {len(raw)} bytes")
    n_data, n_ec = _VERSIONS[version]

    bits: list[int] = []

    def push(value: int, width: int) -> None:
        for i in range(width - 1, -1, -1):
            bits.append((value >> i) & 1)

    push(0b0100, 4)
    push(len(raw), 8)
    for byte in raw:
        push(byte, 8)
    push(0, min(4, n_data * 8 - len(bits)))  # terminator
    while len(bits) % 8:
        bits.append(0)
    codewords = [int("".join(map(str, bits[i : i + 8])), 2) for i in range(0, len(bits), 8)]
    i = 0
    while len(codewords) < n_data:
        codewords.append(_PAD[i % 2])
        i += 1
    codewords += _rs_remainder(codewords, n_ec)

    size = 17 + 4 * version
    grid = [[None] * size for _ in range(size)]  # None = unset data module

    def set_region(r0: int, c0: int, pattern: list[list[int]]) -> None:
        for dr, row in enumerate(pattern):
            for dc, v in enumerate(row):
                r, c = r0 + dr, c0 + dc
                if 0 <= r < size and 0 <= c < size:
                    grid[r][c] = v

    finder = [[1 if (r in (0, 6) or c in (0, 6) or (2 <= r <= 4 and 2 <= c <= 4)) else 0 for c in range(7)] for r in range(7)]
    # separators: blank the area around each finder, then draw the finder
    for r0, c0 in ((0, 0), (0, size - 7), (size - 7, 0)):
        for r in range(r0 - 1, r0 + 8):
            for c in range(c0 - 1, c0 + 8):
                if 0 <= r < size and 0 <= c < size:
                    grid[r][c] = 0
        set_region(r0, c0, finder)

    for i in range(8, size - 8):
        v = 1 if i % 2 == 0 else 0
        if grid[6][i] is None:
            grid[6][i] = v
        if grid[i][6] is None:
            grid[i][6] = v

    align = [[1 if (r in (0, 4) or c in (0, 4) or (r == 2 and c == 2)) else 0 for c in range(5)] for r in range(5)]
    centers = _ALIGNMENT[version]
    for rc in centers:
        for cc in centers:
            if grid[rc][cc] is None:
                set_region(rc - 2, cc - 2, align)

    # reserve format areas and dark module
    fmt = _format_bits(mask=0)
    fmt_bits = [(fmt >> i) & 1 for i in range(14, -1, -1)]
    grid[size - 8][8] = 1  # dark module
    # placement around top-left finder
    coords_a = [(8, c) for c in range(6)] + [(8, 7), (8, 8), (7, 8)] + [(r, 8) for r in range(5, -1, -1)]
    # second copy: down the right of the bottom-left finder and under the top-right
    coords_b = [(size - 1 - r, 8) for r in range(7)] + [(8, size - 8 + c) for c in range(8)]
    for (r, c), b in zip(coords_a, fmt_bits):
        grid[r][c] = b
    for (r, c), b in zip(coords_b, fmt_bits):
        grid[r][c] = b

    # zigzag data placement with mask 0: invert when (r + c) % 2 == 0
    all_bits = []
    for cw in codewords:
        for i in range(7, -1, -1):
            all_bits.append((cw >> i) & 1)
    bit_idx = 0
    col = size - 1
    upward = True
    while col > 0:
        if col == 6:
            col -= 1
        rows = range(size - 1, -1, -1) if upward else range(size)
        for r in rows:
            for c in (col, col - 1):
                if grid[r][c] is None:
                    b = all_bits[bit_idx] if bit_idx < len(all_bits) else 0
                    bit_idx += 1
                    if (r + c) % 2 == 0:
                        b ^= 1
                    grid[r][c] = b
        upward = not upward
        col -= 2
    return [[int(v) for v in row] for row in grid]
