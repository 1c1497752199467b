import json
from pathlib import Path
from typing import Dict, Iterable, List

from sympy import factorint, nextprime


def save_json(data, path) -> Path:
    """Write JSON with stable key order, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")
    return path


def save_jsonl(records: Iterable[Dict], path) -> Path:
    """Write one JSON object per line; field order is the dict insertion order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record) + "\n")
    return path


def load_jsonl(path) -> List[Dict]:
    with Path(path).open("r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def parse_int_list(text: str) -> List[int]:
    """Parse '3,5,7' into [3, 5, 7]."""
    return [int(part) for part in text.split(",") if part.strip()]


def primes_coprime_to(n: int, count: int, start: int = 2) -> List[int]:
    """The first `count` primes >= start that do not divide n."""
    primes = []
    p = start - 1
    while len(primes) < count:
        p = nextprime(p)
        if n % p:
            primes.append(p)
    return primes


def prime_divisors(n: int) -> List[int]:
    return sorted(factorint(abs(n)))
