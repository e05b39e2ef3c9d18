"""A short tour: U(1) on omega, Eisenstein reductions, a Zhu quotient and a trace."""
from voatorus import build
from voatorus.checks import vec_str
from voatorus.elliptic import eisenstein, eisenstein_reduce, reduce_to_R
from voatorus.geomod import a_coeffs, apply_u1
from voatorus.modular import check_s_closure_characters
from voatorus.trace import trace_series
from voatorus.zhu import a_tilde, iso_check


def main():
    print("A_1, A_2 =", ", ".join(str(c) for c in a_coeffs(2)))

    vir = build("virasoro:1/2", 6)
    print("U(1) omega =", vec_str(apply_u1(vir.V, vir.omega)))

    print("G~4 =", eisenstein(2, 3))
    print("G10 =", eisenstein_reduce(5))
    print("wp~4 =", reduce_to_R(4))

    heis = build("heisenberg", 6)
    q = a_tilde(heis, 4)
    print("dim A~(V) for Heisenberg at cutoff 4:", q.dim())
    print("isomorphic to Zhu's A(V):", iso_check(heis, 4).passed)

    # bare character of the Heisenberg vacuum module: q^{-1/24} (1 + q + 2q^2 + ...)
    T, terms, _ = trace_series([heis.vertex_map(heis.V)], [heis.vacuum()], 6)
    print("q^(%s) *" % T.offset, [str(terms.get((m, (0,)), 0)) for m in range(7)])

    lat = build("lattice:1", 4)
    r = check_s_closure_characters(lat)
    print("S on lattice:1 characters:\n", r.matrix.round(12))


if __name__ == "__main__":
    main()
