"""The monomial model of the negative half of the quantized enveloping
algebra: words in divided powers, their product, the restriction coproduct
with its explicit shift, twisted derivations, and Serre elements.

A word is a tuple ((i_1, a_1), ..., (i_k, a_k)) of (vertex index,
multiplicity) pairs with all a_l >= 1 and no two adjacent entries sharing a
vertex; it stands for the product F_{i_1}^{(a_1)} ... F_{i_k}^{(a_k)}.
Merging of adjacent equal vertices is performed by the product and emits a
Gaussian binomial scalar, F_i^{(a)} F_i^{(b)} = [a+b choose a] F_i^{(a+b)}.
No further straightening is attempted; relations are imposed only in the
module quotient.
"""

from __future__ import annotations

from .qarith import LaurentPoly, ZERO, ONE, qbinom
from . import cartan


EMPTY_WORD = ()


def word_content(word, n):
    out = [0] * n
    for i, a in word:
        out[i] += a
    return tuple(out)


def word_is_normalized(word):
    if any(a < 1 for _, a in word):
        return False
    return all(word[l][0] != word[l + 1][0] for l in range(len(word) - 1))


def word_str(word, quiver):
    """Text form '1^2.2^1' with vertex ids."""
    if not word:
        return "1"  # the empty monomial acts as the identity
    return ".".join(f"{quiver.vertex_id(i)}^{a}" for i, a in word)


def parse_word(text, quiver):
    if text == "1":
        return EMPTY_WORD
    out = []
    for chunk in text.split("."):
        vid, _, mult = chunk.rpartition("^")
        out.append((quiver.index[vid], int(mult)))
    word = tuple(out)
    if not word_is_normalized(word):
        raise ValueError(f"word {text!r} is not normalized")
    return word


def normalize_slots(slots):
    """Drop zero-multiplicity slots and merge adjacent equal vertices.

    Returns (word, scalar): the Gaussian-binomial scalar emitted by the
    merges, so that the raw slot sequence equals scalar * word in the
    Grothendieck-group model.
    """
    out = []
    scalar = ONE
    for i, a in slots:
        if a == 0:
            continue
        if out and out[-1][0] == i:
            b = out[-1][1]
            scalar = scalar * qbinom(a + b, a)
            out[-1] = (i, a + b)
        else:
            out.append((i, a))
    return tuple(out), scalar


def concat_words(w1, w2):
    """Concatenation with boundary merge; returns (word, scalar)."""
    if not w1:
        return w2, ONE
    if not w2:
        return w1, ONE
    if w1[-1][0] == w2[0][0]:
        i, a = w1[-1]
        b = w2[0][1]
        return w1[:-1] + ((i, a + b),) + w2[1:], qbinom(a + b, a)
    return w1 + w2, ONE


class UMinusElement:
    """Content-homogeneous A-linear combination of words."""

    __slots__ = ("content", "terms")

    def __init__(self, content, terms=None):
        self.content = tuple(content)
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = c

    @staticmethod
    def monomial(quiver, word, coeff=ONE):
        return UMinusElement(word_content(word, quiver.n), {word: coeff})

    @staticmethod
    def unit(quiver):
        return UMinusElement(cartan.zero_vector(quiver.n), {EMPTY_WORD: ONE})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, UMinusElement)
                and self.content == other.content and self.terms == other.terms)

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.content != other.content:
            raise ValueError("adding inhomogeneous elements")
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, ZERO) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return UMinusElement(self.content, out)

    def __neg__(self):
        return UMinusElement(self.content, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coeff):
        if not coeff:
            return UMinusElement(self.content)
        return UMinusElement(self.content,
                             {w: c * coeff for w, c in self.terms.items()})

    def __repr__(self):
        return f"UMinusElement({self.content!r}, {self.terms!r})"


def mono_mul(quiver, x, y):
    """Bilinear extension of concatenation with the merge rule."""
    out = {}
    for w1, c1 in x.terms.items():
        for w2, c2 in y.terms.items():
            w, scal = concat_words(w1, w2)
            c = c1 * c2 * scal
            s = out.get(w, ZERO) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
    return UMinusElement(cartan.vec_add(x.content, y.content), out)


# -- restriction coproduct -------------------------------------------------


def _shift_exponent(quiver, slots, bs):
    """The shift M(tau, omega) for one slotwise splitting.

    ``slots`` is the raw word ((i_l, a_l)); ``bs`` the tau-multiplicities
    b_l (the omega part is c_l = a_l - b_l).  Evaluated on the un-dropped
    slot data; the five contributions are, in order: the cross term over
    edge pairs with l' < l, the global edge term on total dimensions, the
    two same-vertex slot-order terms, and the global same-vertex term.
    """
    n = quiver.n
    k = len(slots)
    cs = [slots[l][1] - bs[l] for l in range(k)]
    tau = [0] * n
    omega = [0] * n
    for l in range(k):
        tau[slots[l][0]] += bs[l]
        omega[slots[l][0]] += cs[l]
    m = 0
    # - sum_{h in H, l' < l} (tau^{l'}_{h'} omega^{l}_{h''} + tau^{l'}_{h''} omega^{l}_{h'})
    for lp in range(k):
        if not bs[lp]:
            continue
        ip = slots[lp][0]
        for l in range(lp + 1, k):
            if cs[l]:
                m -= 2 * quiver.a[ip][slots[l][0]] * bs[lp] * cs[l]
    # + sum_{h in H} (dim T_{h'} dim W_{h''} + dim T_{h''} dim W_{h'})
    m += 2 * quiver.arrow_pairing(tau, omega)
    # - sum_{i, l < l'} tau_i^{l'} omega_i^{l}  and  + sum_{i, l > l'} ...
    for lp in range(k):
        if not bs[lp]:
            continue
        ip = slots[lp][0]
        for l in range(k):
            if l == lp or not cs[l] or slots[l][0] != ip:
                continue
            if l < lp:
                m -= bs[lp] * cs[l]
            else:
                m += bs[lp] * cs[l]
    # - sum_i dim T_i dim W_i
    m -= sum(tau[i] * omega[i] for i in range(n))
    return m


def _splittings(slots, target):
    """Yield tuples (b_l) with 0 <= b_l <= a_l and content sum = target."""
    k = len(slots)
    n = len(target)

    def rec(l, remaining, acc):
        if l == k:
            if all(x == 0 for x in remaining):
                yield tuple(acc)
            return
        i, a = slots[l]
        left = sum(remaining)
        cap_rest = sum(s[1] for s in slots[l + 1:])
        for b in range(min(a, remaining[i]), -1, -1):
            if left - b > cap_rest:
                continue
            rem = list(remaining)
            rem[i] -= b
            yield from rec(l + 1, tuple(rem), acc + [b])

    yield from rec(0, target, [])


def restriction_coproduct(quiver, word, split, raw=False):
    """All coproduct components of a word for one content split.

    ``split`` is a pair (tau content, omega content) summing to the word's
    content.  Returns a list of (tau word, omega word, coefficient) with
    normalized words and coefficients aggregating v^M times the merge
    scalars; with ``raw=True``, one un-normalized entry per slotwise
    splitting is returned as (slots_b, slots_c, shift M).
    """
    tau_c, omega_c = split
    content = word_content(word, quiver.n)
    if cartan.vec_add(tau_c, omega_c) != content:
        raise ValueError(f"split {split} does not sum to the content {content}")
    raw_terms = []
    for bs in _splittings(word, tau_c):
        m = _shift_exponent(quiver, word, bs)
        raw_terms.append((bs, m))
    if raw:
        return [(
            tuple((word[l][0], bs[l]) for l in range(len(word))),
            tuple((word[l][0], word[l][1] - bs[l]) for l in range(len(word))),
            m,
        ) for bs, m in raw_terms]
    agg = {}
    for bs, m in raw_terms:
        tau_word, s1 = normalize_slots((word[l][0], bs[l]) for l in range(len(word)))
        omega_word, s2 = normalize_slots(
            (word[l][0], word[l][1] - bs[l]) for l in range(len(word)))
        coeff = LaurentPoly.v_power(m) * s1 * s2
        key = (tau_word, omega_word)
        s = agg.get(key, ZERO) + coeff
        if s:
            agg[key] = s
        else:
            agg.pop(key, None)
    return [(t, o, agg[(t, o)]) for t, o in sorted(agg)]


def rbar(quiver, x, i):
    """Derivation extracting the coproduct component with second factor F_i."""
    n = quiver.n
    if x.content[i] == 0:
        return UMinusElement(cartan.vec_sub(x.content, cartan.unit_vector(n, i, 0)))
    target = cartan.vec_sub(x.content, cartan.unit_vector(n, i))
    out = UMinusElement(target)
    unit = cartan.unit_vector(n, i)
    for word, c in x.terms.items():
        for tau, omega, coeff in restriction_coproduct(quiver, word, (target, unit)):
            assert omega == ((i, 1),)
            out = out + UMinusElement(target, {tau: c * coeff})
    return out


def ibar(quiver, x, i):
    """Derivation extracting the coproduct component with first factor F_i."""
    n = quiver.n
    if x.content[i] == 0:
        return UMinusElement(cartan.vec_sub(x.content, cartan.unit_vector(n, i, 0)))
    target = cartan.vec_sub(x.content, cartan.unit_vector(n, i))
    out = UMinusElement(target)
    unit = cartan.unit_vector(n, i)
    for word, c in x.terms.items():
        for tau, omega, coeff in restriction_coproduct(quiver, word, (unit, target)):
            assert tau == ((i, 1),)
            out = out + UMinusElement(target, {omega: c * coeff})
    return out


def rbar_derivation(quiver, x, i):
    """Right bar-derivation in the convention that pairs with the module.

    Same slot extraction as ``rbar`` but with each slot term twisted by
    v^{-n_i(mu)}, where mu is the content of the slots to the right and
    n_i(mu) counts arrows from i into mu.  With this twist the operator
    satisfies rd(xy) = v^{-(a_i, |y|)} rd(x) y + x rd(y) and the module
    identity linking E_i to the two derivations holds on the nose.
    """
    return _twisted_extraction(quiver, x, i, right=True)


def ibar_derivation(quiver, x, i):
    """Left bar-derivation: ld(xy) = ld(x) y + v^{-(a_i, |x|)} x ld(y)."""
    return _twisted_extraction(quiver, x, i, right=False)


def _twisted_extraction(quiver, x, i, right):
    n = quiver.n
    if x.content[i] == 0:
        return UMinusElement(cartan.vec_sub(x.content, cartan.unit_vector(n, i, 0)))
    target = cartan.vec_sub(x.content, cartan.unit_vector(n, i))
    out = UMinusElement(target)
    for word, c in x.terms.items():
        k = len(word)
        for l in range(k):
            if word[l][0] != i:
                continue
            bs = [a for _, a in word]
            bs[l] -= 1
            m = _shift_exponent(quiver, word, bs)
            if right:
                mu = word_content(word[l + 1:], n)
            else:
                mu = word_content(word[:l], n)
                # the un-dropped omega side carries the shift for the left case
                m = _shift_exponent(quiver, word,
                                    [1 if ll == l else 0 for ll in range(k)])
            twist = -sum(quiver.a[i][kk] * mu[kk] for kk in range(n))
            slots = list(word)
            slots[l] = (i, word[l][1] - 1)
            reduced, scal = normalize_slots(slots)
            coeff = c * LaurentPoly.v_power(m + twist) * scal
            out = out + UMinusElement(target, {reduced: coeff})
    return out


def serre_element(quiver, i, j):
    """sum_m (-1)^m F_i^(m) F_j F_i^(1+a_ij-m), the quantum Serre relator."""
    if i == j:
        raise ValueError("serre_element needs two distinct vertices")
    a = quiver.a[i][j]
    n = quiver.n
    content = cartan.vec_add(cartan.unit_vector(n, i, 1 + a), cartan.unit_vector(n, j))
    terms = {}
    for m in range(0, a + 2):
        slots = []
        if m:
            slots.append((i, m))
        slots.append((j, 1))
        if 1 + a - m:
            slots.append((i, 1 + a - m))
        word = tuple(slots)
        sign = LaurentPoly(-1 if m % 2 else 1)
        terms[word] = terms.get(word, ZERO) + sign
    return UMinusElement(content, terms)
