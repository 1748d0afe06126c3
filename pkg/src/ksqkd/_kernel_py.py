"""Pure-Python round-loop kernel (fallback for the compiled extension).

The protocol hot loop only ever measures KS rays in KS bases, so every
Born probability is an exact multiple of 1/16.  The kernel works off
precomputed integer tables (see ``kernel.build_tables``) and per-round
uniform draws; given identical inputs it produces output arrays
bit-identical to the Cython implementation in ``_kernel.pyx``.
"""

from __future__ import annotations

BACKEND = "python"

ADV_NONE, ADV_BALL, ADV_INTERCEPT = 0, 1, 2
NOISE_NONE, NOISE_DEPOLARIZING = 0, 1


def run_rounds_kernel(
    pos_table,      # int32[nv, nb]: outcome position of vector in basis, -1 if absent
    cum_table,      # int32[nv, nb, 4]: cumulative Born numerators over 16
    members,        # int32[nb, 4]: vector id per (basis, position)
    assign,         # int32[nb, 4]: ball symbols per (basis, position)
    adversary_kind: int,
    noise_kind: int,
    noise_p: float,
    ua, ub, un, ue,  # float64[n, 2] uniform draws per stream
    out_alice_basis, out_alice_state, out_bob_basis, out_bob_outcome,
    out_sifted, out_alice_symbol, out_cross,
):
    n = ua.shape[0]
    nb = members.shape[0]
    pos_t = pos_table.tolist()
    cum_t = cum_table.tolist()
    mem_t = members.tolist()
    asg_t = assign.tolist()
    ua_t, ub_t, un_t, ue_t = ua.tolist(), ub.tolist(), un.tolist(), ue.tolist()

    for i in range(n):
        ua1, ua2 = ua_t[i]
        ub1, ub2 = ub_t[i]
        ba = int(ua1 * nb)
        pos_a = int(ua2 * 4)
        v = mem_t[ba][pos_a]
        bb = int(ub1 * nb)
        p_pos = pos_t[v][bb]
        sifted = p_pos >= 0

        if adversary_kind == ADV_BALL:
            if sifted:
                outcome = asg_t[bb][p_pos]
                a_sym = asg_t[ba][pos_a]
            else:
                outcome = int(ue_t[i][0] * 4) + 1
                a_sym = 0
        else:
            fwd = v
            if adversary_kind == ADV_INTERCEPT:
                ue1, ue2 = ue_t[i]
                eb = int(ue1 * nb)
                cum = cum_t[v][eb]
                t = ue2 * 16.0
                k = 0
                while t >= cum[k]:
                    k += 1
                fwd = mem_t[eb][k]
            if noise_kind == NOISE_DEPOLARIZING and un_t[i][0] < noise_p:
                outcome = int(un_t[i][1] * 4) + 1
            else:
                cum = cum_t[fwd][bb]
                t = ub2 * 16.0
                k = 0
                while t >= cum[k]:
                    k += 1
                outcome = k + 1
            a_sym = p_pos + 1 if sifted else 0

        out_alice_basis[i] = ba
        out_alice_state[i] = v
        out_bob_basis[i] = bb
        out_bob_outcome[i] = outcome
        out_sifted[i] = sifted
        out_alice_symbol[i] = a_sym
        out_cross[i] = sifted and bb != ba
