import pytest

from heatsos.diffform import Q, dsym, poly_term
from heatsos.prover import prove


def _proved(family, m, n):
    out = prove(family, m, n)
    assert out.status == "certificate", out.message
    return out


@pytest.fixture(scope="session")
def golden_univariate():
    return _proved("C2", 3, 1)


@pytest.fixture(scope="session")
def golden_pair():
    return _proved("C2", 2, None)


@pytest.fixture(scope="session")
def golden_triple():
    return _proved("C3", 3, 3)


def pair_displayed_rows():
    """The eleven degree-4 pair rows quoted for the generic two-axis
    system, frozen here as reference data for span comparisons."""
    p = dsym()
    pa, pb = dsym("a"), dsym("b")
    paa, pab, pbb = dsym("a", "a"), dsym("a", "b"), dsym("b", "b")
    m1 = poly_term(1, pa, pa)
    m2 = poly_term(1, pb, pb)
    m3 = poly_term(1, pa, pb)
    m4 = poly_term(1, p, pab)
    m5 = poly_term(1, p, paa)
    m6 = poly_term(1, p, pbb)
    return [
        m1 * m6 - (m3 * m3).scale(Q(2)) + (m3 * m4).scale(Q(2)),
        (m2 * m3).scale(Q(-2)) + m2 * m4 + (m3 * m6).scale(Q(2)),
        (m2 * m2).scale(Q(-2)) + (m2 * m6).scale(Q(3)),
        (m1 * m3).scale(Q(-2)) + m1 * m4 + (m3 * m5).scale(Q(2)),
        m2 * m5 - (m3 * m3).scale(Q(2)) + (m3 * m4).scale(Q(2)),
        (m2 * m3).scale(Q(-2)) + (m2 * m4).scale(Q(3)),
        (m1 * m1).scale(Q(-2)) + (m1 * m5).scale(Q(3)),
        poly_term(1, p, p, pb, dsym("b", "b", "b")) - m2 * m6 + m6 * m6,
        poly_term(1, p, p, pa, dsym("a", "a", "a")) - m1 * m5 + m5 * m5,
        poly_term(1, p, p, pa, dsym("a", "b", "b")) - m3 * m4 + m4 * m4,
        poly_term(1, p, p, pb, dsym("a", "a", "b")) - m3 * m4 + m4 * m4,
    ]


def rational_leaves(cert):
    """(container, key) for every stored rational scalar; each one is
    load-bearing, so changing any must invalidate the certificate."""
    out = []

    def from_sos(entries):
        for sq in entries:
            out.append((sq, "c"))
            for i in range(len(sq["e"])):
                out.append((sq["e"], i))

    def from_block(b):
        for k in b["lambdas"]:
            out.append((b["lambdas"], k))
        from_sos(b["sos"])
        for fam in b["families"]:
            from_sos(fam["sos"])

    for b in cert.get("blocks", ()):
        from_block(b)
    if "block" in cert:
        from_block(cert["block"])
    for k in cert.get("shared", ()):
        out.append((cert["shared"], k))
    return out
