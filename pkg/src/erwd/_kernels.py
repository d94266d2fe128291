"""Compiled (numba) twins of the walk and the coupled-block sampler.

The estimator runs billions of steps on one core, so the inner loops are
jitted: an open-addressing hash table of packed coordinates tracks visited
sites, and an inline PCG32 supplies uniforms.  Stream derivation matches
``rng.Pcg32`` bit for bit (tested), and per-replica streams are a pure
function of (seed, replica index), so results do not depend on scheduling.

Coordinates are packed 3 per 64-bit word, 21 bits each, offset by 2^20;
walks are therefore limited to 2^20 - 1 steps (see ``model.MAX_STEPS``).
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64, int64

_MASK64 = uint64(0xFFFFFFFFFFFFFFFF)
_STREAM_SALT = uint64(0xA3EC647659359ACD)
_INC_SALT = uint64(0xDEADBEEFCAFEBABE)
_OFFSET = int64(1 << 20)
_INV32 = 1.0 / 4294967296.0


@njit(inline="always")
def _splitmix64(z):
    z = (z + uint64(0x9E3779B97F4A7C15)) & _MASK64
    z = ((z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)) & _MASK64
    z = ((z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)) & _MASK64
    return z ^ (z >> uint64(31))


@njit(inline="always")
def _stream_init(seed, stream):
    s = _splitmix64(uint64(seed) ^ (uint64(stream) * _STREAM_SALT))
    state = _splitmix64(s)
    inc = _splitmix64(s ^ _INC_SALT) | uint64(1)
    return state, inc


@njit(inline="always")
def _pcg32(state, inc):
    """Advance PCG32 (XSH-RR); returns (new_state, 32-bit output)."""
    new = (state * uint64(6364136223846793005) + inc) & _MASK64
    xorshifted = (((state >> uint64(18)) ^ state) >> uint64(27)) & uint64(0xFFFFFFFF)
    rot = state >> uint64(59)
    out = ((xorshifted >> rot) | (xorshifted << ((-rot) & uint64(31)))) & uint64(0xFFFFFFFF)
    return new, out


@njit(cache=True)
def pcg_uniforms(seed, stream, n):
    """n uniforms from the given stream; equivalence oracle for rng.Pcg32."""
    out = np.empty(n, np.float64)
    state, inc = _stream_init(seed, stream)
    for i in range(n):
        state, r = _pcg32(state, inc)
        out[i] = r * _INV32
    return out


@njit(inline="always")
def _pack(pos, packed, d, nwords):
    for w in range(nwords):
        acc = int64(0)
        base = w * 3
        for c in range(3):
            idx = base + c
            v = (pos[idx] + _OFFSET) if idx < d else int64(0)
            acc = (acc << int64(21)) | v
        packed[w] = acc


@njit(inline="always")
def _hash_words(packed, nwords):
    h = uint64(0)
    for w in range(nwords):
        h = _splitmix64(h ^ uint64(packed[w]))
    return h


@njit(inline="always")
def _lookup_or_insert(keys, used, mask, packed, nwords):
    """Return True if already present; insert and return False otherwise."""
    slot = int64(_hash_words(packed, nwords) & uint64(mask))
    while used[slot]:
        match = True
        for w in range(nwords):
            if keys[slot, w] != packed[w]:
                match = False
                break
        if match:
            return True
        slot = (slot + 1) & mask
    used[slot] = 1
    for w in range(nwords):
        keys[slot, w] = packed[w]
    return False


@njit(inline="always")
def _lookup(keys, used, mask, packed, nwords):
    slot = int64(_hash_words(packed, nwords) & uint64(mask))
    while used[slot]:
        match = True
        for w in range(nwords):
            if keys[slot, w] != packed[w]:
                match = False
                break
        if match:
            return True
        slot = (slot + 1) & mask
    return False


@njit(inline="always")
def _capacity_for(n_sites):
    cap = int64(1)
    while cap < 2 * (n_sites + 2):
        cap <<= 1
    return cap


@njit(cache=True)
def walk_endpoints(d, beta, mu, n_steps, n_walks, seed):
    """First coordinate after n_steps, for n_walks independent seeded walks."""
    nwords = (d + 2) // 3
    cap = _capacity_for(n_steps + 1)
    mask = cap - 1
    keys = np.empty((cap, nwords), np.int64)
    used = np.zeros(cap, np.uint8)
    pos = np.empty(d, np.int64)
    packed = np.empty(nwords, np.int64)
    out = np.empty(n_walks, np.int64)
    twod = 2.0 * d
    for walk in range(n_walks):
        for i in range(cap):
            used[i] = 0
        state, inc = _stream_init(seed, walk)
        for i in range(d):
            pos[i] = 0
        x1 = int64(0)
        fresh = True
        _pack(pos, packed, d, nwords)
        _lookup_or_insert(keys, used, mask, packed, nwords)
        for _ in range(n_steps):
            a = beta if fresh else -mu
            state, r = _pcg32(state, inc)
            v = (r * _INV32) * twod
            if v < 1.0 + a:
                pos[0] += 1
                x1 += 1
            elif v < 2.0:
                pos[0] -= 1
                x1 -= 1
            else:
                b = int64(v) - 2
                axis = 1 + (b >> 1)
                if b & 1:
                    pos[axis] -= 1
                else:
                    pos[axis] += 1
            _pack(pos, packed, d, nwords)
            fresh = not _lookup_or_insert(keys, used, mask, packed, nwords)
        out[walk] = x1
    return out


@njit(cache=True)
def walk_path_codes(d, beta, mu, n_steps, n_walks, seed):
    """Whole short paths as base-(2d) codes; direction order +e1,-e1,+e2,-e2,...

    Only sensible for small n_steps (code must fit in int64); used by the
    empirical path-law tests.
    """
    nwords = (d + 2) // 3
    cap = _capacity_for(n_steps + 1)
    mask = cap - 1
    keys = np.empty((cap, nwords), np.int64)
    used = np.zeros(cap, np.uint8)
    pos = np.empty(d, np.int64)
    packed = np.empty(nwords, np.int64)
    out = np.empty(n_walks, np.int64)
    twod = 2.0 * d
    for walk in range(n_walks):
        for i in range(cap):
            used[i] = 0
        state, inc = _stream_init(seed, walk)
        for i in range(d):
            pos[i] = 0
        fresh = True
        code = int64(0)
        _pack(pos, packed, d, nwords)
        _lookup_or_insert(keys, used, mask, packed, nwords)
        for _ in range(n_steps):
            a = beta if fresh else -mu
            state, r = _pcg32(state, inc)
            v = (r * _INV32) * twod
            if v < 1.0 + a:
                pos[0] += 1
                dir_ix = int64(0)
            elif v < 2.0:
                pos[0] -= 1
                dir_ix = int64(1)
            else:
                b = int64(v) - 2
                axis = 1 + (b >> 1)
                if b & 1:
                    pos[axis] -= 1
                else:
                    pos[axis] += 1
                dir_ix = 2 + b
            code = code * int64(2 * d) + dir_ix
            _pack(pos, packed, d, nwords)
            fresh = not _lookup_or_insert(keys, used, mask, packed, nwords)
        out[walk] = code
    return out


@njit(inline="always")
def _three_step_bins(d, beta, mu, e1c, f0, fresh1, fresh2, bins):
    """Weights of the 7 net first-coordinate displacements over all (2d)^3 paths.

    fresh1[i1] / fresh2[i1, i2] give the cookie state of the first / second
    intermediate site; the all-fresh call yields the replaced-cookie law.
    """
    twod = 2 * d
    for k in range(7):
        bins[k] = 0.0
    a0 = beta if f0 else -mu
    for i1 in range(twod):
        w1 = 1.0 + a0 * e1c[i1]
        if w1 == 0.0:
            continue
        a1 = beta if fresh1[i1] else -mu
        for i2 in range(twod):
            w2 = w1 * (1.0 + a1 * e1c[i2])
            if w2 == 0.0:
                continue
            a2 = beta if fresh2[i1, i2] else -mu
            for i3 in range(twod):
                w3 = w2 * (1.0 + a2 * e1c[i3])
                k = e1c[i1] + e1c[i2] + e1c[i3]
                bins[int64(k) + 3] += w3


@njit(cache=True)
def coupled_blocks(d, beta, mu, n_blocks, n_runs, seed):
    """Coupled sampler: the true walk and the replaced-cookie comparison walk.

    Per block, one shared uniform is inverse-transformed through two
    three-step laws ordered by net first-coordinate displacement: the law
    given the walk's current environment, and the law with every cookie
    restored.  The restored law's distribution function never exceeds the
    environment law's (more cookies push right), so the comparison jump is
    >= the true jump in every block, by construction.

    A second uniform picks the actual path of the true walk conditionally
    on its jump, so the true walk keeps exactly the model law.

    Returns (omega_jumps, nu_jumps, omega_dirs): per-run per-block jumps of
    both walks (int8) and the true walk's step directions (int8, 3 per
    block, same direction codes as walk_path_codes).
    """
    twod = 2 * d
    nwords = (d + 2) // 3
    cap = _capacity_for(3 * n_blocks + 1)
    mask = cap - 1
    keys = np.empty((cap, nwords), np.int64)
    used = np.zeros(cap, np.uint8)
    pos = np.empty(d, np.int64)
    site = np.empty(d, np.int64)
    packed = np.empty(nwords, np.int64)

    dirs = np.zeros((twod, d), np.int64)
    e1c = np.zeros(twod, np.int64)
    for axis in range(d):
        dirs[2 * axis, axis] = 1
        dirs[2 * axis + 1, axis] = -1
    e1c[0] = 1
    e1c[1] = -1

    fresh1 = np.empty(twod, np.uint8)
    fresh2 = np.empty((twod, twod), np.uint8)
    bins = np.empty(7, np.float64)
    full_bins = np.empty(7, np.float64)
    cum = np.empty(7, np.float64)
    full_cum = np.empty(7, np.float64)

    # replaced-cookie law: same enumeration code path with all-fresh flags,
    # so identical environments produce bitwise-identical weights
    for i in range(twod):
        fresh1[i] = 1
        for j in range(twod):
            fresh2[i, j] = 1
    _three_step_bins(d, beta, mu, e1c, True, fresh1, fresh2, full_bins)
    acc = 0.0
    for k in range(7):
        acc += full_bins[k]
        full_cum[k] = acc
    full_total = acc

    omega_jumps = np.empty((n_runs, n_blocks), np.int8)
    nu_jumps = np.empty((n_runs, n_blocks), np.int8)
    omega_dirs = np.empty((n_runs, 3 * n_blocks), np.int8)

    for run in range(n_runs):
        for i in range(cap):
            used[i] = 0
        state, inc = _stream_init(seed, run)
        for i in range(d):
            pos[i] = 0
        for block in range(n_blocks):
            # cookie state of the current site and of both intermediate sites
            _pack(pos, packed, d, nwords)
            f0 = not _lookup(keys, used, mask, packed, nwords)
            for i1 in range(twod):
                for i in range(d):
                    site[i] = pos[i] + dirs[i1, i]
                _pack(site, packed, d, nwords)
                fresh1[i1] = 0 if _lookup(keys, used, mask, packed, nwords) else 1
            for i1 in range(twod):
                for i2 in range(twod):
                    if i2 == (i1 ^ 1):
                        fresh2[i1, i2] = 0  # back at the start site: just visited
                        continue
                    for i in range(d):
                        site[i] = pos[i] + dirs[i1, i] + dirs[i2, i]
                    _pack(site, packed, d, nwords)
                    fresh2[i1, i2] = 0 if _lookup(keys, used, mask, packed, nwords) else 1

            _three_step_bins(d, beta, mu, e1c, f0, fresh1, fresh2, bins)
            acc = 0.0
            for k in range(7):
                acc += bins[k]
                cum[k] = acc
            total = acc

            state, r = _pcg32(state, inc)
            u = r * _INV32
            k_omega = 6
            for k in range(7):
                if cum[k] > u * total:
                    k_omega = k
                    break
            k_nu = 6
            for k in range(7):
                if full_cum[k] > u * full_total:
                    k_nu = k
                    break
            omega_jumps[run, block] = k_omega - 3
            nu_jumps[run, block] = k_nu - 3

            # draw the true walk's path conditionally on its jump: walk the
            # same enumeration order, accumulating weights within the bin
            state, r = _pcg32(state, inc)
            target = (r * _INV32) * bins[k_omega]
            a0 = beta if f0 else -mu
            acc = 0.0
            d1 = int64(0)
            d2 = int64(0)
            d3 = int64(0)
            done = False
            for i1 in range(twod):
                if done:
                    break
                w1 = 1.0 + a0 * e1c[i1]
                if w1 == 0.0:
                    continue
                a1 = beta if fresh1[i1] else -mu
                for i2 in range(twod):
                    if done:
                        break
                    w2 = w1 * (1.0 + a1 * e1c[i2])
                    if w2 == 0.0:
                        continue
                    a2 = beta if fresh2[i1, i2] else -mu
                    for i3 in range(twod):
                        if e1c[i1] + e1c[i2] + e1c[i3] + 3 != k_omega:
                            continue
                        w3 = w2 * (1.0 + a2 * e1c[i3])
                        acc += w3
                        if acc >= target and w3 > 0.0:
                            d1, d2, d3 = i1, i2, i3
                            done = True
                            break

            # apply the three steps: mark each departure site as visited
            ib = 3 * block
            omega_dirs[run, ib] = d1
            omega_dirs[run, ib + 1] = d2
            omega_dirs[run, ib + 2] = d3
            for s in (d1, d2, d3):
                _pack(pos, packed, d, nwords)
                _lookup_or_insert(keys, used, mask, packed, nwords)
                for i in range(d):
                    pos[i] += dirs[s, i]
    return omega_jumps, nu_jumps, omega_dirs


def warmup() -> None:
    """Trigger JIT compilation of all kernels with tiny inputs."""
    pcg_uniforms(1, 0, 2)
    walk_endpoints(2, 0.5, 0.5, 8, 2, 1)
    walk_path_codes(2, 0.5, 0.5, 3, 2, 1)
    coupled_blocks(2, 0.5, 0.5, 2, 2, 1)
