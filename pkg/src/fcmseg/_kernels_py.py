"""Pure-Python fallback for the numeric kernels.

Mirrors the compiled extension ``fcmseg._kernels`` function for function.
Both backends evaluate the same IEEE-754 double expressions in the same
order, so their results are bit-identical; this module is simply much
slower and is used when the extension is unavailable (or when forced via
the FCMSEG_PURE environment variable).

Conventions shared by both backends:

* all buffers are flat, C-contiguous float64 arrays,
* membership is stored row-major as ``u[pixel * c + cluster]``,
* summations run in the exact order documented per function, because the
  association order of floating-point addition is part of the contract.
"""

# SplitMix64: the documented membership-initialization generator.
# One 64-bit state; each draw adds the odd constant GAMMA and scrambles.
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1
# 2**-53; draws are ((z >> 11) + 1) * 2**-53, uniform on (0, 1]
_INV53 = 1.0 / 9007199254740992.0


def splitmix64(state):
    """Advance a SplitMix64 state; return (new_state, 64-bit output)."""
    state = (state + _GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return state, z ^ (z >> 31)


def fill_membership_random(u, n, c, seed):
    """Fill the flat n*c membership buffer with seeded random rows.

    Each row draws c uniforms on (0, 1], divides the first c-1 by the row
    total, and sets the last entry to 1 minus the running partial sum so a
    left-to-right row sum is exactly 1.0.
    """
    state = seed & _MASK64
    for i in range(n):
        row = []
        total = 0.0
        for _ in range(c):
            state, z = splitmix64(state)
            val = float((z >> 11) + 1) * _INV53
            row.append(val)
            total = total + val
        base = i * c
        partial = 0.0
        for j in range(c - 1):
            val = row[j] / total
            u[base + j] = val
            partial = partial + val
        last = 1.0 - partial
        if last < 0.0:
            last = 0.0
        u[base + c - 1] = last


def update_centers_linear(x, u, v_out, n, c, m):
    """Weighted-mean center update, accumulated in pixel-index order.

    Returns the index of the first cluster whose weight sum is exactly
    zero, or -1 if every center was computed.
    """
    for j in range(c):
        num = 0.0
        den = 0.0
        for i in range(n):
            w = float(u[i * c + j]) ** m
            num = num + w * float(x[i])
            den = den + w
        if den == 0.0:
            return j
        v_out[j] = num / den
    return -1


def update_membership_range(x, v, u_out, c, m, i0, i1):
    """Membership update for pixels [i0, i1); each pixel is independent.

    u_ij = 1 / sum_k (d_ij / d_ik)^(2/(m-1)) with d_ij = |x_i - v_j|.
    Pixels sitting exactly on one or more centers split membership
    equally over the zero-distance clusters (the limit of the formula).
    """
    expo = 2.0 / (m - 1.0)
    vs = [float(t) for t in v]
    for i in range(i0, i1):
        xi = float(x[i])
        base = i * c
        zero_count = 0
        for k in range(c):
            if abs(xi - vs[k]) == 0.0:
                zero_count += 1
        if zero_count > 0:
            share = 1.0 / float(zero_count)
            for j in range(c):
                u_out[base + j] = share if abs(xi - vs[j]) == 0.0 else 0.0
        else:
            for j in range(c):
                dj = abs(xi - vs[j])
                s = 0.0
                for k in range(c):
                    s = s + (dj / abs(xi - vs[k])) ** expo
                u_out[base + j] = 1.0 / s


def center_terms_range(x, u, num_out, den_out, c, j, m, i0, i1):
    """Per-pixel numerator/denominator terms of the center update."""
    for i in range(i0, i1):
        w = float(u[i * c + j]) ** m
        num_out[i] = w * float(x[i])
        den_out[i] = w


def block_reduce_range(a, out, n, block_size, b0, b1):
    """Tree-reduce blocks [b0, b1) of a into per-block partial sums.

    Block b loads the 2*block_size elements starting at b*span into a
    local buffer (zero for indices past n), then halves the stride from
    block_size down to 1, adding buf[t] += buf[t + stride] at each level.
    The association order is exactly this tree.
    """
    span = 2 * block_size
    buf = [0.0] * span
    for b in range(b0, b1):
        start = b * span
        for t in range(block_size):
            gi = start + t
            buf[t] = float(a[gi]) if gi < n else 0.0
            gi = start + t + block_size
            buf[t + block_size] = float(a[gi]) if gi < n else 0.0
        stride = block_size
        while stride > 0:
            for t in range(stride):
                buf[t] = buf[t] + buf[t + stride]
            stride >>= 1
        out[b] = buf[0]


def linear_sum(a, k):
    """Left-to-right sum of the first k elements (single-lane order)."""
    s = 0.0
    for i in range(k):
        s = s + float(a[i])
    return s


def objective_linear(x, u, v, n, c, m):
    """Weighted squared-distance objective, pixel-major accumulation."""
    vs = [float(t) for t in v]
    s = 0.0
    for i in range(n):
        xi = float(x[i])
        base = i * c
        for j in range(c):
            d = xi - vs[j]
            s = s + float(u[base + j]) ** m * (d * d)
    return s


def objective_terms_range(x, u, v, out, c, m, i0, i1):
    """Per-pixel objective contributions for pixels [i0, i1)."""
    vs = [float(t) for t in v]
    for i in range(i0, i1):
        xi = float(x[i])
        base = i * c
        acc = 0.0
        for j in range(c):
            d = xi - vs[j]
            acc = acc + float(u[base + j]) ** m * (d * d)
        out[i] = acc


def max_abs_diff(a, b, i0, i1):
    """Largest elementwise absolute difference over [i0, i1)."""
    best = 0.0
    for i in range(i0, i1):
        d = abs(float(a[i]) - float(b[i]))
        if d > best:
            best = d
    return best


def argmax_rows(u, labels_out, n, c):
    """Per-row argmax of the flat n*c matrix; ties keep the lowest index."""
    for i in range(n):
        base = i * c
        best = float(u[base])
        bj = 0
        for j in range(1, c):
            w = float(u[base + j])
            if w > best:
                best = w
                bj = j
        labels_out[i] = bj
