"""On-disk digit streams and the digit cache.

File layout: one JSON header line ``{"base", "count", "format_version",
"spec"}`` followed by the body.  For ``base <= 36`` the body is the digits
as characters ``0-9a-z`` wrapped at 120 characters; newlines are ignored on
read.  For larger bases it is whitespace-separated decimal digit values.
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Callable, Optional

from filelock import FileLock

from .errors import DigitforgeError, ParseError
from .words import DIGIT_CHARS, DigitWord

FORMAT_VERSION = 1
LINE_WIDTH = 120
VALUES_PER_LINE = 20


def format_stream(word: DigitWord, spec: str = "") -> str:
    header = json.dumps({"base": word.base, "count": len(word),
                         "format_version": FORMAT_VERSION, "spec": spec}, sort_keys=True)
    d = word.digits
    if word.base <= 36:
        text = "".join(DIGIT_CHARS[x] for x in d)
        lines = [text[i:i + LINE_WIDTH] for i in range(0, len(text), LINE_WIDTH)]
    else:
        lines = [" ".join(map(str, d[i:i + VALUES_PER_LINE]))
                 for i in range(0, len(d), VALUES_PER_LINE)]
    return header + "\n" + "".join(line + "\n" for line in lines)


def parse_stream(text: str):
    """Returns ``(word, header)``."""
    first, _, body = text.partition("\n")
    try:
        header = json.loads(first)
        base, count = int(header["base"]), int(header["count"])
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError("bad digit stream header: %s" % exc) from None
    if header.get("format_version") != FORMAT_VERSION:
        raise ParseError("unsupported format_version %r" % header.get("format_version"))
    if base <= 36:
        word = DigitWord.from_str("".join(body.split("\n")).strip("\r"), base)
    else:
        try:
            word = DigitWord([int(t) for t in body.split()], base)
        except ValueError as exc:
            raise ParseError("bad digit value: %s" % exc) from None
    if len(word) != count:
        raise ParseError("header says %d digits, body has %d" % (count, len(word)))
    return word, header


def write_stream(path, word: DigitWord, spec: str = "") -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_stream(word, spec))
    os.replace(tmp, path)


def read_stream(path):
    with open(path, encoding="ascii", newline="") as fh:
        return parse_stream(fh.read())


class DigitCache:
    """Digit streams keyed by a canonical number key and base.

    A request for more digits than cached recomputes the longer prefix and
    checks that it extends the cached one before replacing the file.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: str, base: int) -> Path:
        h = hashlib.sha256(("%s|base=%d" % (key, base)).encode()).hexdigest()[:32]
        return self.root / ("%s.dg" % h)

    def _load(self, path) -> Optional[DigitWord]:
        try:
            return read_stream(path)[0]
        except FileNotFoundError:
            return None

    def get(self, key: str, base: int, n: int, compute: Callable[[int], DigitWord]) -> DigitWord:
        path = self.path_for(key, base)
        have = self._load(path)
        if have is not None and len(have) >= n:
            return have[:n]
        with FileLock(str(path) + ".lock"):
            have = self._load(path)
            if have is not None and len(have) >= n:
                return have[:n]
            word = compute(n)
            if have is not None and word[:len(have)] != have:
                raise DigitforgeError("cached stream %s disagrees with a recompute" % path.name)
            write_stream(path, word, key)
            return word
