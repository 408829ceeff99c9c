"""Finitely supported probability distributions with exact rational weights."""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping
from fractions import Fraction
from typing import Any

__all__ = ["Dist", "as_fraction", "DistError"]


class DistError(ValueError):
    """Raised when weights do not form a probability distribution."""


def as_fraction(value: Any) -> Fraction:
    """Convert ``value`` to a Fraction; floats are refused to keep weights exact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("boolean is not a probability")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing float weight {value!r}; use Fraction or 'n/d'")
    return Fraction(value)


class Dist(Mapping):
    """Immutable, hashable distribution ``key -> Fraction``.

    Zero entries are dropped on construction, so two distributions are equal
    exactly when their non-zero weights agree key by key.  Keys may be any
    hashable value, including other ``Dist`` objects (distributions over
    distributions).
    """

    __slots__ = ("_w", "_hash")

    def __init__(self, weights: Mapping[Hashable, Any] | Iterable[tuple[Hashable, Any]],
                 *, check: bool = True):
        items = weights.items() if isinstance(weights, Mapping) else weights
        w: dict[Hashable, Fraction] = {}
        for k, v in items:
            v = as_fraction(v)
            if v:
                w[k] = w.get(k, Fraction(0)) + v
        w = {k: v for k, v in w.items() if v}
        if check:
            if not w:
                raise DistError("empty support")
            if any(v < 0 or v > 1 for v in w.values()):
                raise DistError(f"weights outside (0,1]: {w}")
            total = sum(w.values())
            if total != 1:
                raise DistError(f"weights sum to {total}, not 1")
        self._w = w
        self._hash: int | None = None

    @classmethod
    def point(cls, key: Hashable) -> "Dist":
        return cls({key: Fraction(1)}, check=False)

    @classmethod
    def uniform(cls, keys: Iterable[Hashable]) -> "Dist":
        keys = list(keys)
        return cls({k: Fraction(1, len(keys)) for k in keys})

    @classmethod
    def combine(cls, parts: Iterable[tuple[Any, "Dist"]]) -> "Dist":
        """Convex combination ``sum_i p_i * d_i``."""
        acc: dict[Hashable, Fraction] = {}
        for p, d in parts:
            p = as_fraction(p)
            if not p:
                continue
            for k, v in d.items():
                acc[k] = acc.get(k, Fraction(0)) + p * v
        return cls(acc)

    def __getitem__(self, key: Hashable) -> Fraction:
        return self._w[key]

    def get(self, key: Hashable, default: Any = Fraction(0)) -> Any:
        return self._w.get(key, default)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self._w)

    def __len__(self) -> int:
        return len(self._w)

    def __contains__(self, key: object) -> bool:
        return key in self._w

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dist):
            return self._w == other._w
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._w.items()))
        return self._hash

    def __repr__(self) -> str:
        body = " + ".join(f"{v}*{k!r}" for k, v in self.sorted_items())
        return f"Dist({body})"

    def sorted_items(self) -> list[tuple[Hashable, Fraction]]:
        try:
            return sorted(self._w.items())
        except TypeError:
            return sorted(self._w.items(), key=lambda kv: repr(kv[0]))

    @property
    def support(self) -> frozenset:
        return frozenset(self._w)

    def is_point(self) -> bool:
        return len(self._w) == 1

    def mix(self, p: Any, other: "Dist") -> "Dist":
        """``p * self + (1 - p) * other``."""
        p = as_fraction(p)
        return Dist.combine([(p, self), (1 - p, other)])

    def product(self, other: "Dist") -> "Dist":
        """Product distribution over pairs ``(x, y)``."""
        return Dist({(x, y): p * q for x, p in self._w.items() for y, q in other._w.items()},
                    check=False)

    def map(self, f) -> "Dist":
        """Push-forward along ``f``."""
        acc: dict[Hashable, Fraction] = {}
        for k, v in self._w.items():
            fk = f(k)
            acc[fk] = acc.get(fk, Fraction(0)) + v
        return Dist(acc, check=False)
