"""Text-layer extraction for the PDFs this package emits.

render_pdf keeps content streams uncompressed, so the text layer is
recoverable by walking the Tj/TJ operators inside each BT..ET block.
Consecutive shows within a block concatenate (reportlab splits runs around
entities like '&'); line moves (T*, Td, TD) become spaces. Good enough to
assert presence of headings and table content; not a general PDF parser.
"""

import re

_STREAM = re.compile(rb"stream\r?\n(.*?)endstream", re.DOTALL)
_BT_BLOCK = re.compile(rb"BT(.*?)ET", re.DOTALL)
_TOKEN = re.compile(
    rb"\((?:\\.|[^()\\])*\)\s*Tj"        # literal-string show
    rb"|\[(?:[^\]\\]|\\.)*\]\s*TJ"       # array show
    rb"|T\*"                              # next line
    rb"|-?[\d.]+\s+-?[\d.]+\s+T[dD]",    # line move
    re.DOTALL,
)
_LITERAL = re.compile(rb"\((?:\\.|[^()\\])*\)", re.DOTALL)

_ESCAPES = {
    b"\\n": b"\n", b"\\r": b"\r", b"\\t": b"\t", b"\\b": b"\b",
    b"\\f": b"\f", b"\\(": b"(", b"\\)": b")", b"\\\\": b"\\",
}


def _unescape(literal: bytes) -> bytes:
    body = literal[1:-1]
    out = bytearray()
    i = 0
    while i < len(body):
        if body[i:i + 1] == b"\\" and i + 1 < len(body):
            two = body[i:i + 2]
            if two in _ESCAPES:
                out += _ESCAPES[two]
                i += 2
                continue
            if body[i + 1:i + 2].isdigit():  # octal escape
                digits = body[i + 1:i + 4]
                length = 0
                while length < 3 and length < len(digits) and digits[length:length + 1].isdigit():
                    length += 1
                out.append(int(digits[:length], 8))
                i += 1 + length
                continue
            out += body[i + 1:i + 2]
            i += 2
            continue
        out += body[i:i + 1]
        i += 1
    return bytes(out)


def extract_text(pdf: bytes) -> str:
    """The text shown by all Tj/TJ operators, whitespace-normalized."""
    pieces = []
    for stream in _STREAM.finditer(pdf):
        for block in _BT_BLOCK.finditer(stream.group(1)):
            parts = []
            for token in _TOKEN.finditer(block.group(1)):
                chunk = token.group(0)
                if chunk.endswith(b"Tj") or chunk.endswith(b"TJ"):
                    parts.append(b"".join(
                        _unescape(lit.group(0)) for lit in _LITERAL.finditer(chunk)
                    ))
                else:  # line move
                    parts.append(b" ")
            text = b"".join(parts)
            if text.strip():
                pieces.append(text.decode("latin-1"))
    return re.sub(r"\s+", " ", " ".join(pieces)).strip()
