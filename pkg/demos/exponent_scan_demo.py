"""Scanning norm exponents for the weighted equation.

Replace every square in the weighted functional equation by free
exponents (p, q, u, v):

    ||r x + s y||^p + r s ||x - y||^q  vs  r ||x||^u + s ||y||^v

and measure the defect over sampled pairs.  On an inner-product space,
only the all-squares pattern (2, 2, 2, 2) survives a sweep of the
3^4 = 81 patterns with entries in {1, 2, 3}.  On the l1 plane not even
that one does -- the equation genuinely needs the quadratic geometry,
not just the quadratic exponent.
"""

from quadlab import (
    Sampler,
    default_exponent_grid,
    equation_params,
    euclidean,
    exponent_scan,
    p_norm,
)


def main():
    params = equation_params("1/3")
    grid = default_exponent_grid()
    print(f"grid size: {len(grid)} exponent patterns, entries in {{1, 2, 3}}")

    for label, space in [("euclidean plane", euclidean(2)),
                         ("l1 plane", p_norm(2, 1.0))]:
        table = exponent_scan(space, params, grid,
                              Sampler.restricted_pairs(9, 300, 2.0),
                              tol=1e-9)
        flagged = [e.label() for e in table.flagged()]
        print()
        print(f"== {label} ==")
        print("  flagged as defect-free:", flagged or "(none)")

        scored = [(entry.sup_defect, entry.exponents.label())
                  for entry in table.entries
                  if entry.sup_defect is not None]
        scored.sort()
        print("  five smallest sup defects:")
        for sup, label_ in scored[:5]:
            print(f"    {label_:14s} sup = {sup:.3e}")


if __name__ == "__main__":
    main()
