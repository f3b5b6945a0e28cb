"""Regenerate the code files under src/bpgd_erasure/data.

The B1 lifted-product code is built from its published base matrices. The
two hypergraph-product codes are built from random (3,4)-regular seeds with
girth >= 6 and full rank, drawn with fixed generator seeds; they have the
same parameters as the published codes but are not the same matrices.
"""

from pathlib import Path

from bpgd_erasure.codes import (LiftedBase, hgp, lifted_product, random_regular_seed,
                                save_code, write_alist, write_lifted_base)

DATA = Path(__file__).resolve().parents[1] / "src" / "bpgd_erasure" / "data"

HGP_SEEDS = {
    # name: (n, m, generator seed)
    "hgp1600": (32, 24, 0),
    "hgp2025": (36, 27, 0),
}


def b1_bases():
    first_row = [{27}, set(), set(), set(), set(), {0}, {54}]
    a = LiftedBase(tuple(tuple(first_row[(j - i) % 7] for j in range(7)) for i in range(7)), 63)
    # b(x) = 1 + x + x^6 enters as its conjugate, so that the binary
    # expansion matches H_X = [A | b I], H_Z = [b* I | A*]
    b = LiftedBase((({0, 63 - 1, 63 - 6},),), 63)
    return a, b


def main():
    DATA.mkdir(exist_ok=True)
    a, b = b1_bases()
    write_lifted_base(a, DATA / "b1_a.lift", "B1 base matrix A (7x7 over F2[x]/(x^63-1))")
    write_lifted_base(b, DATA / "b1_b.lift", "B1 second base: conjugate of b(x) = 1 + x + x^6")
    code = lifted_product(a, b, name="b1")
    assert (code.n, code.k) == (882, 24), (code.n, code.k)
    save_code(code, DATA / "b1.css", "[[882,24]] B1 lifted-product code, L=63")

    for name, (n, m, seed) in HGP_SEEDS.items():
        h = random_regular_seed(n, m, 3, 4, rng=seed)
        write_alist(h, DATA / f"{name}_seed.alist")
        code = hgp(h, h, name=name)
        save_code(code, DATA / f"{name}.css",
                  f"[[{code.n},{code.k}]] hypergraph product of a random (3,4)-regular "
                  f"{m}x{n} seed (girth >= 6, full rank, generator seed {seed})")
        print(name, code)


if __name__ == "__main__":
    main()
