from typing import Iterable, TypeVar

from tqdm import tqdm

T = TypeVar("T")


def progress_bar(iterable: Iterable[T], *, enabled: bool = True, desc: str = "") -> Iterable[T]:
    """tqdm around long driver loops; a no-op when disabled (tests, nested runs)."""
    if not enabled:
        return iterable
    return tqdm(iterable, desc=desc, leave=False, unit="step")
