"""Local elimination of the exponent k for fixed (x, n).

Primes p = 2in + 1 are taken in increasing order. T_k(x) mod p depends
only on k mod (p - 1), so each prime yields a set of admissible residues
of k mod (p - 1); the surviving set modulo the running lcm of the p - 1 is
lifted and filtered one prime at a time until it is empty.
"""
from __future__ import annotations

import enum
import functools
import json
import math
import os
import tempfile
from dataclasses import dataclass, field, replace
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .exact import power_sum_T, primes_up_to
from .valuation import vp

FORMAT_VERSION = 1
_INT64_MAX = 2**63 - 1
_INT64_SAFE = 3_037_000_499  # p below this keeps (p-1)^2 inside int64


class Status(str, enum.Enum):
    RUNNING = "Running"
    PROVEN = "Proven"
    UNDECIDED = "Undecided"


class ModulusCapExceeded(RuntimeError):
    def __init__(self, modulus: int, cap: int, what: str = "modulus"):
        super().__init__(f"{what} {modulus} exceeds the cap {cap}")
        self.modulus = modulus
        self.cap = cap


class CheckpointError(ValueError):
    """A checkpoint file is corrupt or written by an incompatible version."""


@dataclass(frozen=True)
class SieveConfig:
    max_primes: int = 500
    max_modulus: int = 10**18  # residues are int64
    checkpoint_every: int = 10
    checkpoint_path: Optional[str] = None
    max_residues: int = 50_000_000  # size guard for the lifted array

    def __post_init__(self):
        for name in ("max_primes", "max_modulus", "checkpoint_every", "max_residues"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_modulus > _INT64_MAX:
            raise ValueError("max_modulus must fit in int64")


@dataclass
class SieveState:
    x: int
    n: int
    modulus: int = 1
    residues: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))
    primes_used: List[int] = field(default_factory=list)
    status: Status = Status.RUNNING
    reason: str = ""

    def __post_init__(self):
        self.residues = np.asarray(self.residues, dtype=np.int64)
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        if self.residues.size and (self.residues[0] < 0 or self.residues[-1] >= self.modulus):
            raise ValueError("residues must lie in [0, modulus)")
        if self.status is Status.PROVEN and self.residues.size:
            raise ValueError("a proven state has no residues")

    @property
    def proven(self) -> bool:
        return self.status is Status.PROVEN

    def key(self) -> tuple:
        """Everything that defines the state, in comparable form."""
        return (
            self.x, self.n, self.modulus, tuple(self.residues.tolist()),
            tuple(self.primes_used), self.status.value, self.reason,
        )

    def __eq__(self, other):
        if not isinstance(other, SieveState):
            return NotImplemented
        return self.key() == other.key()

    def summary(self) -> dict:
        return {
            "x": self.x,
            "n": self.n,
            "status": self.status.value,
            "modulus": str(self.modulus),
            "residues_left": int(self.residues.size),
            "primes_used": len(self.primes_used),
            "last_prime": self.primes_used[-1] if self.primes_used else None,
            "reason": self.reason,
        }


# -- per-prime tables ----------------------------------------------------------


def _check_prime(p: int) -> None:
    if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"{p} is not prime")
    if p >= _INT64_SAFE:
        raise ValueError("prime too large for the int64 tables")


def _powmod_array(base: np.ndarray, exps: np.ndarray, p: int) -> np.ndarray:
    """Elementwise base**exps mod p (both arrays broadcast)."""
    base = np.broadcast_to(np.asarray(base, dtype=np.int64) % p, np.broadcast(base, exps).shape).copy()
    e = np.broadcast_to(np.asarray(exps, dtype=np.int64), base.shape).copy()
    out = np.ones_like(base)
    while e.any():
        odd = (e & 1).astype(bool)
        out[odd] = out[odd] * base[odd] % p
        base = base * base % p
        e >>= 1
    return out


def nth_power_residues(p: int, n: int) -> frozenset:
    """{a^n mod p : 0 <= a < p}."""
    _check_prime(p)
    if n < 1:
        raise ValueError("n must be positive")
    a = np.arange(p, dtype=np.int64)
    return frozenset(_powmod_array(a, np.int64(n), p).tolist())


def _residue_mask(values: np.ndarray, p: int, n: int) -> np.ndarray:
    """Boolean mask: which values are n-th powers mod p (0 included)."""
    g = math.gcd(n, p - 1)
    mask = _powmod_array(values, np.int64((p - 1) // g), p) == 1
    return mask | (values % p == 0)


def t_mod_table(x: int, p: int) -> np.ndarray:
    """Entry k-1 is T_k(x) mod p for k = 1..p-1."""
    _check_prime(p)
    if x < 1:
        raise ValueError("x must be positive")
    if p == 2:
        return np.array([(x // 2) % 2], dtype=np.int64)  # odd terms in (x, 2x]
    ks = np.arange(1, p, dtype=np.int64)
    total = np.zeros(p - 1, dtype=np.int64)
    for b in range(x + 1, 2 * x + 1):
        total = (total + _powmod_array(np.int64(b), ks, p)) % p
    return total


def admissible_mask(x: int, p: int, n: int) -> np.ndarray:
    """Boolean array over r in [0, p-1): may k = r (mod p-1) survive?"""
    table = t_mod_table(x, p)
    ok = _residue_mask(table, p, n)
    # residue r stands for k = r (mod p-1); k = 0 is represented by T_{p-1}
    return np.roll(ok, 1)


def admissible_k_residues(x: int, p: int, n: int) -> frozenset:
    return frozenset(np.flatnonzero(admissible_mask(x, p, n)).tolist())


# -- lifting -------------------------------------------------------------------


def _lift(residues: np.ndarray, modulus: int, new_modulus: int) -> np.ndarray:
    reps = new_modulus // modulus
    steps = np.arange(reps, dtype=np.int64) * modulus
    return (residues[:, None] + steps[None, :]).ravel()


def lift_and_filter(
    state: SieveState,
    p: int,
    max_modulus: int = SieveConfig.max_modulus,
    max_residues: int = SieveConfig.max_residues,
    workers: int = 1,
) -> SieveState:
    """Apply one more prime and return the new state."""
    if p in state.primes_used:
        raise ValueError(f"prime {p} already used")
    new_modulus = math.lcm(state.modulus, p - 1)
    if new_modulus > max_modulus:
        raise ModulusCapExceeded(new_modulus, max_modulus)
    lifted_size = state.residues.size * (new_modulus // state.modulus)
    if lifted_size > max_residues:
        raise ModulusCapExceeded(lifted_size, max_residues, what="lifted residue count")
    mask = admissible_mask(state.x, p, state.n)
    survivors = _filter(state.residues, state.modulus, new_modulus, mask, p - 1, workers)
    status = Status.PROVEN if survivors.size == 0 else Status.RUNNING
    return replace(
        state,
        modulus=new_modulus,
        residues=survivors,
        primes_used=state.primes_used + [p],
        status=status,
        reason="",
    )


def _filter_chunk(args) -> np.ndarray:
    residues, modulus, new_modulus, mask, period = args
    cand = _lift(residues, modulus, new_modulus)
    return cand[mask[cand % period]]


def _filter(residues, modulus, new_modulus, mask, period, workers: int) -> np.ndarray:
    if workers > 1 and residues.size >= 2 * workers:
        from concurrent.futures import ThreadPoolExecutor

        chunks = np.array_split(residues, workers)
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(_filter_chunk, [(c, modulus, new_modulus, mask, period) for c in chunks]))
        out = np.concatenate(parts)
    else:
        out = _filter_chunk((residues, modulus, new_modulus, mask, period))
    return np.sort(out)


# -- driver --------------------------------------------------------------------


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):  # deterministic below 3.3e24
        y = pow(a, d, m)
        if y in (1, m - 1):
            continue
        for _ in range(s - 1):
            y = y * y % m
            if y == m - 1:
                break
        else:
            return False
    return True


def sieve_primes(n: int, start_after: int = 0) -> Iterator[int]:
    """Primes p = 2in + 1, ascending, greater than ``start_after``."""
    step = 2 * n
    i = max(1, (start_after - 1) // step + 1)
    while True:
        p = step * i + 1
        if p > start_after and _is_prime(p):
            yield p
        i += 1


def _check_exponent(n: int) -> None:
    if n < 3 or (n != 4 and not (n % 2 and _is_prime(n))):
        raise ValueError("run_sieve needs n to be an odd prime or 4; reduce composite n first")


def run_sieve(
    x: int,
    n: int,
    config: SieveConfig = SieveConfig(),
    state: Optional[SieveState] = None,
    stop_after: Optional[int] = None,
    workers: int = 1,
) -> SieveState:
    """Fold lift_and_filter over p = 2in + 1 until the residue set is empty.

    ``state`` resumes an earlier run, including one that stopped Undecided
    on a budget or cap. ``stop_after`` limits how many primes
    this call applies (the state stays Running), which is how an
    interruption is simulated. Checkpoints are written every
    ``config.checkpoint_every`` primes when a path is configured.
    """
    if n < 3:
        return SieveState(x, n, status=Status.UNDECIDED, reason="n must be at least 3")
    _check_exponent(n)
    if not 1 <= x:
        raise ValueError("x must be positive")
    if state is None:
        state = SieveState(x, n)
    elif (state.x, state.n) != (x, n):
        raise ValueError("state belongs to a different (x, n)")
    if state.proven:
        return state
    if state.status is Status.UNDECIDED:
        # a budget or cap stop resumes under the (possibly larger) new config
        state = replace(state, status=Status.RUNNING, reason="")
    last = state.primes_used[-1] if state.primes_used else 0
    applied = 0
    for p in sieve_primes(n, last):
        if len(state.primes_used) >= config.max_primes:
            state = replace(state, status=Status.UNDECIDED,
                            reason=f"prime budget of {config.max_primes} exhausted")
            break
        if stop_after is not None and applied >= stop_after:
            break
        try:
            state = lift_and_filter(state, p, config.max_modulus, config.max_residues, workers)
        except ModulusCapExceeded as exc:
            state = replace(state, status=Status.UNDECIDED, reason=f"at p={p}: {exc}")
            break
        applied += 1
        if config.checkpoint_path and len(state.primes_used) % config.checkpoint_every == 0:
            checkpoint_save(state, config.checkpoint_path)
        if state.proven:
            break
    if config.checkpoint_path:
        checkpoint_save(state, config.checkpoint_path)
    return state


def apply_primes(x: int, n: int, primes: Sequence[int], max_modulus: int = 10**18) -> SieveState:
    """Apply an explicit prime sequence (any order) starting from K(1) = {0}."""
    state = SieveState(x, n)
    for p in primes:
        state = lift_and_filter(state, p, max_modulus=max_modulus)
    return state


# -- checkpoints ---------------------------------------------------------------


def checkpoint_save(state: SieveState, path: str) -> None:
    """Atomically write ``state`` as JSON (temporary file, then rename)."""
    record = {
        "format_version": FORMAT_VERSION,
        "x": str(state.x),
        "n": str(state.n),
        "modulus": str(state.modulus),
        "residues": [str(r) for r in state.residues.tolist()],
        "primes_used": [str(p) for p in state.primes_used],
        "status": state.status.value,
        "reason": state.reason,
    }
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".ckpt-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fp:
            json.dump(record, fp)
            fp.flush()
            os.fsync(fp.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def checkpoint_load(path: str) -> SieveState:
    try:
        with open(path) as fp:
            record = json.load(fp)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: not a valid checkpoint ({exc})") from exc
    if not isinstance(record, dict) or "format_version" not in record:
        raise CheckpointError(f"{path}: missing format_version")
    if record["format_version"] != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format_version {record['format_version']!r}, expected {FORMAT_VERSION}"
        )
    try:
        state = SieveState(
            x=int(record["x"]),
            n=int(record["n"]),
            modulus=int(record["modulus"]),
            residues=np.array([int(r) for r in record["residues"]], dtype=np.int64),
            primes_used=[int(p) for p in record["primes_used"]],
            status=Status(record["status"]),
            reason=record.get("reason", ""),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise CheckpointError(f"{path}: corrupt checkpoint ({exc})") from exc
    if math.lcm(1, *[p - 1 for p in state.primes_used]) != state.modulus:
        raise CheckpointError(f"{path}: modulus does not match the recorded primes")
    if np.any(np.diff(state.residues) <= 0):
        raise CheckpointError(f"{path}: residues not strictly increasing")
    return state


# -- helpers used by the orchestrator -----------------------------------------


def reduce_exponent(n: int) -> List[int]:
    """Exponents whose exclusion covers n: odd prime divisors, plus 4 if 4 | n."""
    if n < 3:
        raise ValueError("n must be at least 3")
    out = []
    m, q = n, 2
    while m > 1 and q * q <= m:
        if m % q == 0:
            if q > 2:
                out.append(q)
            while m % q == 0:
                m //= q
        q += 1
    if m > 2:
        out.append(m)
    if n % 4 == 0:
        out.append(4)
    return sorted(set(out))


@functools.lru_cache(maxsize=8)
def _primes(limit: int) -> tuple:
    return tuple(primes_up_to(limit))


def small_prime_exponent_cap(x: int, k: int, prime_limit: int) -> Optional[Tuple[int, int]]:
    """Smallest prime p <= prime_limit dividing T_k(x), with v_p(T_k(x))."""
    t = power_sum_T(k, x)
    for p in _primes(prime_limit):
        if t % p == 0:
            return p, vp(t, p)
    return None
