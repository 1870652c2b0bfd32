"""Sign evaluator written directly from the definitions, as products of +1/-1."""


def reorder_sign(degs, order):
    """Sign of bringing symbols listed in `order` (indices into degs) into increasing order by adjacent swaps."""
    seq = list(order)
    sign = 1
    changed = True
    while changed:
        changed = False
        for p in range(len(seq) - 1):
            if seq[p] > seq[p + 1]:
                a, b = seq[p], seq[p + 1]
                sign *= (-1) ** (degs[a] * degs[b])
                seq[p], seq[p + 1] = b, a
                changed = True
    return sign


def epsilon(alpha, gamma, n, k=None):
    k = len(alpha) if k is None else k
    s = (-1) ** (k * n + 1)
    for j, a in enumerate(alpha, start=1):
        s *= (-1) ** (j * (a + 1))
    for g in gamma:
        s *= (-1) ** g
    return s


def koszul(I, J, degs):
    return reorder_sign(degs, list(I) + list(J))


def iota(alpha, gamma, prefix_len, I, J):
    pre = sum(alpha[j] + 1 for j in range(prefix_len))
    gJ = sum(gamma[j] for j in J)
    gI = sum(gamma[j] for j in I)
    return (-1) ** (gJ * pre) * (-1) ** pre * (-1) ** gI * koszul(I, J, gamma)


def delta(k1, k2, i, n):
    return (-1) ** (k2 * (k1 - i) + i - n)


def cyclic(degs):
    """Moving the last shifted symbol in front of all others."""
    *head, last = degs
    s = 1
    for d in head:
        s *= (-1) ** ((last + 1) * (d + 1))
    return s


def nu(degs, k2, i):
    """Sign of a paired composition; degs holds the k+1 degrees and i is 1-based."""
    s = -1
    for j in range(1, i):
        s *= (-1) ** (degs[j - 1] + 1)
    for j in range(i + k2, len(degs) + 1):
        rest = sum(degs[m - 1] + 1 for m in range(1, len(degs) + 1) if m != j) + 1
        s *= (-1) ** ((degs[j - 1] + 1) * rest)
    return s
