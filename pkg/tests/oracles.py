"""Independent numerical oracles used to verify closed forms.

The slab oracle solves the same scattering problem as the library's
amplitude formulas but by composing piecewise-constant transfer matrices
(interface + propagation in local slab coordinates), so it shares no code
or algebra with the closed forms it checks. Delta functions are realized
as thin tall rectangles.
"""

import numpy as np

from scatent.smatrix import DeltaBarrier, DoubleDelta, HardWall, SquareBarrier

DELTA_SLAB_WIDTH = 1e-9


def _interface(ka, kb):
    ratio = ka / kb
    return 0.5 * np.array([[1.0 + ratio, 1.0 - ratio],
                           [1.0 - ratio, 1.0 + ratio]], dtype=complex)


def _propagate(k, width):
    phase = np.exp(1j * k * width)
    return np.array([[phase, 0.0], [0.0, 1.0 / phase]], dtype=complex)


def slab_amplitudes(slabs, q, m):
    """t, r for a piecewise-constant potential, incident from the left.

    ``slabs`` is a list of (width, V) laid contiguously and centered on the
    origin; the potential is zero outside. Wave numbers are
    k = sqrt(2 m (E - V)) with E = q^2 / (2 m), complex under barriers.
    """
    total = sum(w for w, _ in slabs)
    x_left = -0.5 * total
    matrix = np.eye(2, dtype=complex)
    k_prev = complex(q)
    for width, v in slabs:
        k_here = np.sqrt(complex(q * q - 2.0 * m * v))
        matrix = _interface(k_prev, k_here) @ matrix
        matrix = _propagate(k_here, width) @ matrix
        k_prev = k_here
    matrix = _interface(k_prev, complex(q)) @ matrix
    t = np.exp(-1j * q * total) / matrix[1, 1]
    r = -(matrix[1, 0] / matrix[1, 1]) * np.exp(2j * q * x_left)
    return t, r


def slabs_for(model, n_slices=10_000):
    """Piecewise-constant representation of a potential model."""
    if isinstance(model, SquareBarrier):
        w = model.width / n_slices
        return [(w, model.height)] * n_slices
    if isinstance(model, DeltaBarrier):
        eps = DELTA_SLAB_WIDTH
        return [(eps, model.strength / eps)]
    if isinstance(model, DoubleDelta):
        eps = DELTA_SLAB_WIDTH
        tall = model.strength / eps
        return [(eps, tall), (model.separation - eps, 0.0), (eps, tall)]
    if isinstance(model, HardWall):
        # Realized as an extremely strong delta barrier.
        eps = 1e-8
        return [(eps, 1e8 / eps)]
    raise TypeError(f"no slab representation for {model!r}")


def oracle_amplitudes(model, q, m, n_slices=10_000):
    return slab_amplitudes(slabs_for(model, n_slices), q, m)


def quadrature_overlap(state, n=200_001, pad=10.0):
    """Trapezoid quadrature of |integral phi_1(p) phi_2(p) dp|."""
    s = max(state.sigma1, state.sigma2)
    lo = min(state.k1, state.k2) - pad * s
    hi = max(state.k1, state.k2) + pad * s
    p = np.linspace(lo, hi, n)
    n1 = (2.0 * np.pi * state.sigma1**2) ** -0.25
    n2 = (2.0 * np.pi * state.sigma2**2) ** -0.25
    phi1 = n1 * np.exp(1j * state.a1 * p - (p - state.k1) ** 2 / (4 * state.sigma1**2))
    phi2 = n2 * np.exp(1j * state.a2 * p - (p - state.k2) ** 2 / (4 * state.sigma2**2))
    return abs(np.trapezoid(phi1 * phi2, p))
