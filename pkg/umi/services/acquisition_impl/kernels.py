import numpy as np
from numba import jit, prange


@jit(nopython=True, parallel=True, nogil=True)
def synthesize_echoes(emitter_index, emitter_delay, path_time, path_gain, reflectivity, time_origin, dt, n_samples, sigma_t, support, center_frequency):
    """Single-scattering echoes in complex baseband.

    emitter_index, emitter_delay: (N_in, K) elements fired per input channel and their emission delays (µs).
    path_time: (N_elem, M) one-way travel times; path_gain: (N_elem, M) one-way complex gains.
    Returns (N_in, N_elem, n_samples) complex128.
    """
    n_in, n_fire = emitter_index.shape
    n_elem, n_scat = path_time.shape
    out = np.zeros((n_in, n_elem, n_samples), dtype=np.complex128)
    two_pi_fc = 2.0 * np.pi * center_frequency

    for i in prange(n_in):
        for k in range(n_fire):
            e = emitter_index[i, k]
            for m in range(n_scat):
                g_in = path_gain[e, m]
                if g_in == 0:
                    continue
                t_in = emitter_delay[i, k] + path_time[e, m]
                for o in range(n_elem):
                    g_out = path_gain[o, m]
                    if g_out == 0:
                        continue
                    t_arrival = t_in + path_time[o, m]
                    amplitude = reflectivity[m] * (g_in * g_out)
                    carrier = np.exp(-1j * two_pi_fc * t_arrival)
                    first = max(int(np.ceil((t_arrival - support - time_origin) / dt)), 0)
                    last = min(int(np.floor((t_arrival + support - time_origin) / dt)), n_samples - 1)
                    for s in range(first, last + 1):
                        offset = (time_origin + s * dt - t_arrival) / sigma_t
                        out[i, o, s] += amplitude * carrier * np.exp(-0.5 * offset * offset)
    return out
