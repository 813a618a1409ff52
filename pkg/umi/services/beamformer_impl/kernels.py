import numpy as np
from numba import jit, prange


@jit(nopython=True, parallel=True, nogil=True)
def focus_band(signals, delay_in, delay_out, weight_in, weight_out, neighbours, time_origin, sampling_frequency, center_frequency):
    """Delay-and-sum between input and output focal points of one depth plane.

    signals: (N_in, N_out, N_t) complex baseband.
    delay_in, weight_in: (N_in, N_ρ); delay_out, weight_out: (N_out, N_ρ).
    neighbours: (N_ρ, N_off) flat index of ρ_out per offset, −1 to skip.
    Samples are read by linear interpolation of the baseband signal and rotated
    by exp(+i2πf_cτ); delays outside the record contribute zero.
    """
    n_in, n_out, n_t = signals.shape
    n_points, n_offsets = neighbours.shape
    out = np.zeros((n_points, n_offsets), dtype=np.complex128)
    two_pi_fc = 2.0 * np.pi * center_frequency

    for p in prange(n_points):
        for q in range(n_offsets):
            r = neighbours[p, q]
            if r < 0:
                continue
            acc = 0.0 + 0.0j
            for i in range(n_in):
                w_in = weight_in[i, p]
                if w_in == 0.0:
                    continue
                t_in = delay_in[i, p]
                for o in range(n_out):
                    w_out = weight_out[o, r]
                    if w_out == 0.0:
                        continue
                    tau = t_in + delay_out[o, r]
                    position = (tau - time_origin) * sampling_frequency
                    j = int(np.floor(position))
                    if j < 0 or j >= n_t - 1:
                        continue
                    frac = position - j
                    sample = signals[i, o, j] * (1.0 - frac) + signals[i, o, j + 1] * frac
                    acc += w_in * w_out * sample * np.exp(1j * two_pi_fc * tau)
            out[p, q] = acc
    return out
