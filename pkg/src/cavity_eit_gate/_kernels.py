"""Adaptive Dormand-Prince 5(4) integrator for the single-excitation amplitudes.

State layout (complex128, length 7):
    0 c10, 1 c11, 2 c20, 3 c30,
    4 ∫|α_out|² dt, 5 2Γ3∫|c30|² dt, 6 2κ_B∫|c11|² dt   (real parts only)

The control field is a piecewise-linear table (a single entry means constant)
and the input is a Gaussian ``amp * exp(-(t - t0)^2 / 2η^2)``.
"""

import numpy as np

from ._accel import njit

STANDARD = 0
AS_PRINTED = 1

OK = 0
STEP_UNDERFLOW = 1
TOO_MANY_STEPS = 2

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


@njit(nogil=True)
def control_at(t, om_t, om_v):
    n = om_t.shape[0]
    if n == 1:
        return om_v[0]
    if t <= om_t[0]:
        return om_v[0]
    if t >= om_t[n - 1]:
        return om_v[n - 1]
    j = np.searchsorted(om_t, t) - 1
    w = (t - om_t[j]) / (om_t[j + 1] - om_t[j])
    return om_v[j] + w * (om_v[j + 1] - om_v[j])


@njit(nogil=True)
def gaussian_input(t, amp, t0, eta):
    s = (t - t0) / eta
    return amp * np.exp(-0.5 * s * s)


@njit(nogil=True)
def rhs(t, y, out, rates, om_t, om_v, amp, t0, eta, variant):
    kA = rates[0]
    kB = rates[1]
    g = rates[2]
    g31 = rates[3]
    g32 = rates[4]
    g3 = g31 + g32
    sq = np.sqrt(2.0 * kA)
    alpha = gaussian_input(t, amp, t0, eta)
    om = control_at(t, om_t, om_v)
    c11 = y[1]
    c20 = y[2]
    c30 = y[3]
    if variant == STANDARD:
        out[0] = 0.0
        out[1] = -(kA + kB) * c11 - 1j * g * c30 + sq * alpha
        out[2] = -1j * om * c30
    else:
        out[0] = kA * c11 + g31 * c30
        out[1] = -kA * c11 - 1j * g * c30 + sq * alpha
        out[2] = (-1j * om + g32) * c30
    out[3] = -g3 * c30 - 1j * g * c11 - 1j * om * c20
    a_out = sq * c11 - alpha
    out[4] = a_out.real * a_out.real + a_out.imag * a_out.imag
    out[5] = 2.0 * g3 * (c30.real * c30.real + c30.imag * c30.imag)
    out[6] = 2.0 * kB * (c11.real * c11.real + c11.imag * c11.imag)


@njit(nogil=True)
def integrate_amplitudes(y0, t_grid, rates, om_t, om_v, amp, t0, eta, variant, rtol, atol, max_steps):
    """Integrate from t_grid[0], landing exactly on every grid point.

    Returns (states[n_t, 7], status, accepted_steps).
    """
    n_t = t_grid.shape[0]
    m = y0.shape[0]
    states = np.zeros((n_t, m), dtype=np.complex128)
    y = y0.copy()
    states[0, :] = y
    k1 = np.empty(m, dtype=np.complex128)
    k2 = np.empty(m, dtype=np.complex128)
    k3 = np.empty(m, dtype=np.complex128)
    k4 = np.empty(m, dtype=np.complex128)
    k5 = np.empty(m, dtype=np.complex128)
    k6 = np.empty(m, dtype=np.complex128)
    k7 = np.empty(m, dtype=np.complex128)
    tmp = np.empty(m, dtype=np.complex128)
    y_new = np.empty(m, dtype=np.complex128)

    t = t_grid[0]
    span = t_grid[n_t - 1] - t_grid[0]
    h = span / max(n_t - 1, 1)
    if h <= 0.0:
        return states, OK, 0
    rhs(t, y, k1, rates, om_t, om_v, amp, t0, eta, variant)
    steps = 0
    attempts = 0
    for i in range(1, n_t):
        t_target = t_grid[i]
        while t < t_target:
            attempts += 1
            if attempts > max_steps:
                return states, TOO_MANY_STEPS, steps
            last = False
            if t + h >= t_target:
                h_try = t_target - t
                last = True
            else:
                h_try = h
            if h_try < 1e-14 * (abs(t) + span):
                return states, STEP_UNDERFLOW, steps

            for j in range(m):
                tmp[j] = y[j] + h_try * A21 * k1[j]
            rhs(t + C2 * h_try, tmp, k2, rates, om_t, om_v, amp, t0, eta, variant)
            for j in range(m):
                tmp[j] = y[j] + h_try * (A31 * k1[j] + A32 * k2[j])
            rhs(t + C3 * h_try, tmp, k3, rates, om_t, om_v, amp, t0, eta, variant)
            for j in range(m):
                tmp[j] = y[j] + h_try * (A41 * k1[j] + A42 * k2[j] + A43 * k3[j])
            rhs(t + C4 * h_try, tmp, k4, rates, om_t, om_v, amp, t0, eta, variant)
            for j in range(m):
                tmp[j] = y[j] + h_try * (A51 * k1[j] + A52 * k2[j] + A53 * k3[j] + A54 * k4[j])
            rhs(t + C5 * h_try, tmp, k5, rates, om_t, om_v, amp, t0, eta, variant)
            for j in range(m):
                tmp[j] = y[j] + h_try * (A61 * k1[j] + A62 * k2[j] + A63 * k3[j] + A64 * k4[j] + A65 * k5[j])
            rhs(t + h_try, tmp, k6, rates, om_t, om_v, amp, t0, eta, variant)
            for j in range(m):
                y_new[j] = y[j] + h_try * (B1 * k1[j] + B3 * k3[j] + B4 * k4[j] + B5 * k5[j] + B6 * k6[j])
            rhs(t + h_try, y_new, k7, rates, om_t, om_v, amp, t0, eta, variant)

            err = 0.0
            for j in range(m):
                e = h_try * (E1 * k1[j] + E3 * k3[j] + E4 * k4[j] + E5 * k5[j] + E6 * k6[j] + E7 * k7[j])
                sc = atol + rtol * max(abs(y[j]), abs(y_new[j]))
                r = abs(e) / sc
                err += r * r
            err = np.sqrt(err / m)

            if err <= 1.0:
                t = t_target if last else t + h_try
                for j in range(m):
                    y[j] = y_new[j]
                    k1[j] = k7[j]
                steps += 1
                if err == 0.0:
                    fac = 5.0
                else:
                    fac = min(5.0, max(0.2, 0.9 * err ** -0.2))
                if not last:
                    h = h_try * fac
                elif fac > 1.0:
                    h = max(h, h_try * fac)
            else:
                h = h_try * max(0.2, 0.9 * err ** -0.2)
        states[i, :] = y
    return states, OK, steps
