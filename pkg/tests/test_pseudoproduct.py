import mpmath
import numpy as np
import pytest

from whitham_lab.dispersion import custom_symbol
from whitham_lab.pseudoproduct import (
    bilinear_B,
    check_bilinear_identity,
    get_block_size,
    pairing_residual,
    pseudo_Q,
    set_block_size,
)
from whitham_lab.spectral import (
    BandLimitError,
    Field,
    Grid,
    GridMismatchError,
    apply_L,
    dealias,
    derivative,
    field_from_modes,
    multiply,
    synthesize,
)

mpmath.mp.dps = 30

MP_P = {
    "whitham": lambda x: mpmath.sqrt(mpmath.tanh(x) / x),
    "bessel": lambda x: (1 + x**4) ** mpmath.mpf("-0.125"),
    "fkdv(1)": lambda x: abs(x),
}


def omega_table(sym_name, n, scale=1.0):
    """omega(k/scale) for integer k in [-(n-1), n-1], evaluated at 30 digits."""
    p = MP_P[sym_name]
    tab = {0: 0.0}
    for k in range(1, n):
        x = mpmath.mpf(k) / mpmath.mpf(scale)
        w = float(p(x) * x)
        tab[k] = w
        tab[-k] = -w
    return tab


def naive_apply(wtab, f, g, antiderivative=False, perturb=None):
    """Reference double loop: scalar arithmetic, ascending j, no blocking."""
    grid = f.grid
    n = grid.n_points
    half = n // 2
    fc = np.fft.fftshift(f.coeffs)
    gc = np.fft.fftshift(g.coeffs)
    out = np.zeros(n, dtype=complex)
    for ki in range(n):
        k = ki - half
        acc = 0.0 + 0.0j
        for ji in range(n):
            j = ji - half
            d = k - j
            if d < -half or d >= half:
                continue
            if d == 0 or j == 0 or k == 0:
                continue
            ph = wtab[d] + wtab[j] - wtab[k]
            if antiderivative:
                weight = -0.5j / ph
            else:
                weight = (k / grid.scale) / (2.0 * ph)
            if perturb is not None and (d, j) in perturb:
                weight = weight + perturb[(d, j)]
            acc = acc + weight * fc[d + half] * gc[ji]
        out[ki] = acc
    c = np.fft.ifftshift(out)
    c[np.abs(grid.k_index) > grid.dealias_band] = 0.0
    return c


def identity_residual_with(sym, u, apply_b):
    """Residual of -u u_x - L dx B(u,u) + B(L dx u, u) + B(u, L dx u)."""
    w = dealias(multiply(u, derivative(u, 1)))
    lux = apply_L(sym, derivative(u, 1))
    t1 = -1.0 * w
    t2 = -1.0 * apply_L(sym, derivative(apply_b(u, u), 1))
    t3 = apply_b(lux, u)
    t4 = apply_b(u, lux)
    res = t1 + t2 + t3 + t4
    scale = max(float(np.linalg.norm(t.coeffs)) for t in (t1, t2, t3, t4))
    return float(np.linalg.norm(res.coeffs)) / scale


@pytest.fixture
def default_block():
    saved = get_block_size()
    yield
    set_block_size(saved)


# ---------------------------------------------------------------------------
# oracle equivalence


@pytest.mark.parametrize("sym_name,n", [("whitham", 32), ("bessel", 64)])
def test_kernel_matches_naive_double_loop(sym_name, n, whitham, bessel, band_field):
    sym = {"whitham": whitham, "bessel": bessel}[sym_name]
    g = Grid(n)
    f = band_field(g, seed=20)
    h = band_field(g, seed=21)
    wtab = omega_table(sym_name, n)
    for anti, kernel in ((False, bilinear_B), (True, pseudo_Q)):
        ref = naive_apply(wtab, f, h, antiderivative=anti)
        got = kernel(sym, f, h).coeffs
        rel = np.linalg.norm(got - ref) / np.linalg.norm(ref)
        assert rel <= 1e-12, (sym_name, anti, rel)


def test_naive_output_is_conjugate_symmetric(whitham, band_field):
    # reality of B on real inputs, checked on the raw unsymmetrized sum
    g = Grid(32)
    u = band_field(g, seed=22)
    raw = naive_apply(omega_table("whitham", 32), u, u)
    mirrored = np.conj(np.roll(raw[::-1], 1))
    assert np.max(np.abs(raw - mirrored)) <= 1e-13 * np.max(np.abs(raw))


def test_fkdv1_closed_forms(fkdv1):
    g = Grid(64)
    u = synthesize(g, np.cos(g.x))
    b = bilinear_B(fkdv1, u, u)
    q = pseudo_Q(fkdv1, u, u)
    # m(1,1) = 2/(2 phi(1,1)) = -1/2 so B = -cos(2x)/4; Q = dx^{-1} B
    assert np.max(np.abs(b.values() + 0.25 * np.cos(2 * g.x))) <= 1e-15
    assert np.max(np.abs(q.values() + 0.125 * np.sin(2 * g.x))) <= 1e-15


def test_q_is_antiderivative_of_b(whitham, band_field):
    g = Grid(64)
    f = band_field(g, seed=23)
    h = band_field(g, seed=24)
    b = bilinear_B(whitham, f, h)
    dq = derivative(pseudo_Q(whitham, f, h), 1)
    assert np.max(np.abs(dq.coeffs - b.coeffs)) <= 1e-13 * np.max(np.abs(b.coeffs))


def test_outputs_symmetric_in_arguments(whitham, band_field):
    g = Grid(64)
    f = band_field(g, seed=25)
    h = band_field(g, seed=26)
    for kernel in (bilinear_B, pseudo_Q):
        left = kernel(whitham, f, h).coeffs
        right = kernel(whitham, h, f).coeffs
        assert np.max(np.abs(left - right)) <= 1e-13 * np.max(np.abs(left))


def test_zero_input_gives_zero(whitham):
    g = Grid(32)
    z = Field(g, np.zeros(32, dtype=complex))
    assert np.all(bilinear_B(whitham, z, z).coeffs == 0.0)
    assert np.all(pseudo_Q(whitham, z, z).coeffs == 0.0)


# ---------------------------------------------------------------------------
# determinism and blocking


def test_repeated_evaluation_is_bit_identical(whitham, band_field):
    g = Grid(64)
    u = band_field(g, seed=27)
    first = bilinear_B(whitham, u, u).coeffs
    second = bilinear_B(whitham, u, u).coeffs
    assert np.array_equal(first, second)


def test_block_size_does_not_change_bits(whitham, band_field, default_block):
    g = Grid(64)
    u = band_field(g, seed=28)
    set_block_size(None)
    ref = bilinear_B(whitham, u, u).coeffs
    for choice in (16, 24, 64, "auto"):
        set_block_size(choice)
        assert np.array_equal(bilinear_B(whitham, u, u).coeffs, ref), choice


def test_block_size_validation(default_block):
    for bad in (0, 8, 2.5, "fast"):
        with pytest.raises(ValueError, match="block size"):
            set_block_size(bad)
    set_block_size(32)
    assert get_block_size() == 32


# ---------------------------------------------------------------------------
# cancellation identities


@pytest.mark.parametrize("sym_name", ["whitham", "bessel"])
def test_bilinear_identity_on_random_fields(sym_name, whitham, bessel, band_field):
    sym = {"whitham": whitham, "bessel": bessel}[sym_name]
    g = Grid(64)
    for seed in range(5):
        u = band_field(g, seed=30 + seed)
        assert check_bilinear_identity(sym, u) <= 1e-10


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pairing_cancellation_on_random_fields(k, whitham, band_field):
    g = Grid(64)
    u = band_field(g, seed=40 + k)
    assert pairing_residual(whitham, u, k) <= 1e-10


def test_identity_checks_require_band_limited_input(whitham):
    g = Grid(64)
    u = field_from_modes(g, {30: 1e-3, 2: 1.0})
    with pytest.raises(BandLimitError):
        check_bilinear_identity(whitham, u)
    with pytest.raises(BandLimitError):
        pairing_residual(whitham, u, 1)
    with pytest.raises(ValueError, match="nonnegative"):
        pairing_residual(whitham, dealias(u), -1)


def test_identity_detects_perturbed_kernel(whitham, band_field):
    # +1e-3 on m at the single pair (2,1) (and its conjugate partner, to
    # keep outputs real) must push the residual far above roundoff
    g = Grid(32)
    u = band_field(g, seed=3)
    wtab = omega_table("whitham", 32)

    def clean(f, h):
        return Field.from_coeffs(g, naive_apply(wtab, f, h), tol=np.inf)

    def bent(f, h):
        pert = {(2, 1): 1e-3, (-2, -1): 1e-3}
        return Field.from_coeffs(g, naive_apply(wtab, f, h, perturb=pert), tol=np.inf)

    assert identity_residual_with(whitham, u, clean) <= 1e-12
    assert identity_residual_with(whitham, u, bent) > 1e-6


# ---------------------------------------------------------------------------
# guards


def test_vanishing_phase_off_zero_set_is_rejected(band_field):
    # p = 1 makes phi identically zero, so no normal form exists
    flat = custom_symbol("1 + 0*xi", alpha=1.0, j_star=1, p_tilde_at_zero=1.0)
    u = band_field(Grid(32), seed=50)
    with pytest.raises(ValueError, match="vanishes off the canonical zero set"):
        bilinear_B(flat, u, u)


def test_grid_mismatch_rejected(whitham, band_field):
    with pytest.raises(GridMismatchError):
        bilinear_B(whitham, band_field(Grid(32), seed=51), band_field(Grid(64), seed=52))
