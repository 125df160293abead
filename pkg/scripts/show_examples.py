#!/usr/bin/env python3
"""Print a tour of the central objects at (alpha=z^4, beta=z^3, k=2).

Shows a compression matrix with its decimation-diagonal pattern, a symbol
recovered back from that matrix, both rank-one constructions, and the
conjugation sandwich.
"""

import numpy as np

from slantmodel.laurent import LaurentPoly
from slantmodel.model_space import InnerFunction
from slantmodel.operators import (
    CompressionSetting,
    build_compression,
    conjugate_operator,
    membership,
    rank_one,
    recover_symbol,
)


def show(title, matrix):
    print(f"\n{title}")
    for row in np.asarray(matrix):
        print("   ", "  ".join(f"{z:.4g}" for z in row))


def main():
    setting = CompressionSetting(InnerFunction.monomial(4), InnerFunction.monomial(3), 2)
    phi = LaurentPoly({-1: 2, 0: 3, 2: 1})
    print("symbol phi = 2 z^-1 + 3 + z^2")

    U = build_compression(phi, setting)
    show("compression matrix (entries a_{2i-j} of phi):", U.entries)

    report = membership(U, setting)
    print(f"\nmembership: member={report.member}, residual={report.residual:.3e}")
    recovered = recover_symbol(report, setting)
    print("recovered symbol:", {n: round(abs(c), 6) for n, c in recovered.items()})
    rebuilt = build_compression(recovered, setting)
    print("rebuild error:", f"{np.abs(rebuilt.entries - U.entries).max():.3e}")

    for kind in ("tilde_k", "k_tilde"):
        mat, symbol = rank_one(setting, 0, kind)
        show(f"rank-one member ({kind}, l=0), symbol {dict(symbol.items())}:", mat.entries)

    sandwich, psi = conjugate_operator(setting, phi=LaurentPoly({4: 1}))
    show("conjugation sandwich of the compression of z^4:", sandwich.entries)
    print("transformed symbol:", dict(psi.items()))


if __name__ == "__main__":
    main()
