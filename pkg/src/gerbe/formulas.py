"""Registry of formula variants for laws with competing printed forms.

A handful of identities in the source material circulate in more than one
form (index slips in the second factor are common).  Each such law is
implemented in every candidate form, and the default is the variant selected
by the exhaustive closure oracles in the test suite.  ``formula_report``
exposes the active selection so reports and documents can record exactly
which forms produced them.

The variants:

``axiom_v``
    Pairing of a 2-crossed module against a product in the second slot.
    ``standard``: {m1, m2 m3} = {m1, m2} * ^(m1 m2 m1^-1){m1, m3}.
    ``printed``:  {m1, m2 m3} = {m1, m3} * ^(m1 m2 m1^-1){m1, m3}.

``bundle1_product``
    Second factor of the degree-1 product.
    ``corrected``: lbar_ij = l_ij * ^(m_j)l~_ij.
    ``printed``:   lbar_ij = l_ij * ^(m_i)l~_ij.

``tcm_product``
    l-part of the degree-2 product with 2-crossed coefficients.
    ``printed``:   lbar_ijk = l_ijk * ^(m_ik){m_jk^-1, ^(n_j)m~_ij} * ^(n_i)l~_ijk.
    ``corrected``: same with final factor ^(m_ik)(^(n_k)l~_ijk) under the
                   derived M-action; the unique final factor whose d1-image
                   closes the boundary relation of the product.

``tcm_inverse``
    l-part of the degree-2 inverse with 2-crossed coefficients.
    ``printed``: ^(n_k^-1){m_jk^-1, m_ij^-1}^-1 * ^(n_i^-1)l_ijk^-1.
    ``derived``: ^(n_k^-1) of ({m_jk^-1, m_ij^-1}^-1 * ^(m_ik^-1)l_ijk^-1),
                 chosen so that the product with the original is exactly
                 trivial.
"""

from __future__ import annotations

from contextlib import contextmanager

DEFAULTS: dict[str, str] = {
    "axiom_v": "standard",
    "bundle1_product": "corrected",
    "tcm_product": "corrected",
    "tcm_inverse": "derived",
}

KNOWN: dict[str, tuple[str, ...]] = {
    "axiom_v": ("standard", "printed"),
    "bundle1_product": ("corrected", "printed"),
    "tcm_product": ("corrected", "printed"),
    "tcm_inverse": ("derived", "printed"),
}

_active = dict(DEFAULTS)


def active(name: str) -> str:
    return _active[name]


def formula_report() -> dict[str, str]:
    """The formula variants currently in force, for reports and documents."""
    return dict(sorted(_active.items()))


@contextmanager
def variant(name: str, value: str):
    """Temporarily select a formula variant (used by the adjudication tests)."""
    if name not in KNOWN:
        raise KeyError(f"unknown formula switch {name!r}")
    if value not in KNOWN[name]:
        raise ValueError(f"unknown variant {value!r} for {name!r}")
    previous = _active[name]
    _active[name] = value
    try:
        yield
    finally:
        _active[name] = previous
