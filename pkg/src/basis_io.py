import re
from pathlib import Path
from typing import List, TextIO, Union

from errors import BasisParseError
from lattice import Basis


class BasisParser:
    """Parse the basis text format: a line `n m`, then n lines of m integers
    (one basis vector per line)"""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.basis = self._load_basis()

    def _load_basis(self) -> Basis:
        try:
            text = self.path.read_text()
        except OSError as e:
            raise BasisParseError(f"Cannot read basis file {self.path}: {e}") from e
        return parse_basis(text, source=str(self.path))

    def get_rank(self) -> int:
        return self.basis.n

    def get_dimension(self) -> int:
        return self.basis.m

    def to_dict(self) -> dict:
        return {
            'n': self.basis.n,
            'm': self.basis.m,
            'vectors': [list(col) for col in self.basis.columns],
        }


INTEGER = re.compile(r'[+-]?[0-9]+')


def _integers(fields: List[str], source: str, lineno: int) -> List[int]:
    bad = next((x for x in fields if not INTEGER.fullmatch(x)), None)
    if bad is not None:
        raise BasisParseError(f"{source}:{lineno}: not an integer: {bad!r}")
    return [int(x) for x in fields]


def parse_basis(text: str, source: str = '<string>') -> Basis:
    lines = [(lineno, line) for lineno, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise BasisParseError(f"{source}: empty basis file")
    head_no, head = lines[0]
    header = head.split()
    if len(header) != 2:
        raise BasisParseError(f"{source}:{head_no}: expected 'n m', got {head!r}")
    n, m = _integers(header, source, head_no)
    if n < 1 or m < n:
        raise BasisParseError(f"{source}:{head_no}: need 1 <= n <= m, got n={n}, m={m}")
    if len(lines) - 1 != n:
        raise BasisParseError(f"{source}: header says {n} vectors, found {len(lines) - 1}")
    vectors: List[List[int]] = []
    for lineno, line in lines[1:]:
        fields = line.split()
        if len(fields) != m:
            raise BasisParseError(f"{source}:{lineno}: expected {m} entries, found {len(fields)}")
        vectors.append(_integers(fields, source, lineno))
    return Basis.from_columns(vectors)


def dumps_basis(B: Basis) -> str:
    lines = [f"{B.n} {B.m}"]
    lines += [" ".join(str(x) for x in col) for col in B.columns]
    return "\n".join(lines) + "\n"


def dump_basis(B: Basis, out: Union[str, Path, TextIO]) -> None:
    if isinstance(out, (str, Path)):
        Path(out).write_text(dumps_basis(B))
    else:
        out.write(dumps_basis(B))
