# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled round-loop kernel.

Mirrors ``_kernel_py.run_rounds_kernel`` operation for operation; for
identical inputs the two produce bit-identical outputs (all branching is
on integer tables and IEEE double comparisons performed the same way).
"""

BACKEND = "cython"

ADV_NONE, ADV_BALL, ADV_INTERCEPT = 0, 1, 2
NOISE_NONE, NOISE_DEPOLARIZING = 0, 1


def run_rounds_kernel(
    int[:, ::1] pos_table,
    int[:, :, ::1] cum_table,
    int[:, ::1] members,
    int[:, ::1] assign,
    int adversary_kind,
    int noise_kind,
    double noise_p,
    double[:, ::1] ua, double[:, ::1] ub,
    double[:, ::1] un, double[:, ::1] ue,
    int[::1] out_alice_basis, int[::1] out_alice_state,
    int[::1] out_bob_basis, int[::1] out_bob_outcome,
    unsigned char[::1] out_sifted, int[::1] out_alice_symbol,
    unsigned char[::1] out_cross,
):
    cdef Py_ssize_t i, n = ua.shape[0]
    cdef int nb = <int> members.shape[0]
    cdef int ba, pos_a, v, bb, p_pos, outcome, a_sym, fwd, eb, k
    cdef bint sifted
    cdef double t

    for i in range(n):
        ba = <int> (ua[i, 0] * nb)
        pos_a = <int> (ua[i, 1] * 4)
        v = members[ba, pos_a]
        bb = <int> (ub[i, 0] * nb)
        p_pos = pos_table[v, bb]
        sifted = p_pos >= 0

        if adversary_kind == 1:  # ball
            if sifted:
                outcome = assign[bb, p_pos]
                a_sym = assign[ba, pos_a]
            else:
                outcome = <int> (ue[i, 0] * 4) + 1
                a_sym = 0
        else:
            fwd = v
            if adversary_kind == 2:  # intercept-resend
                eb = <int> (ue[i, 0] * nb)
                t = ue[i, 1] * 16.0
                k = 0
                while t >= cum_table[v, eb, k]:
                    k += 1
                fwd = members[eb, k]
            if noise_kind == 1 and un[i, 0] < noise_p:
                outcome = <int> (un[i, 1] * 4) + 1
            else:
                t = ub[i, 1] * 16.0
                k = 0
                while t >= cum_table[fwd, bb, k]:
                    k += 1
                outcome = k + 1
            a_sym = p_pos + 1 if sifted else 0

        out_alice_basis[i] = ba
        out_alice_state[i] = v
        out_bob_basis[i] = bb
        out_bob_outcome[i] = outcome
        out_sifted[i] = sifted
        out_alice_symbol[i] = a_sym
        out_cross[i] = 1 if (sifted and bb != ba) else 0
