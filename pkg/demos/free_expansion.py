"""The free residual improves order by order in ``c^-2``.

For zero coefficients the Klein-Gordon solution is available exactly in
Fourier space. Removing the Schrodinger branch leaves a residual of size
``c^-2``. Subtracting the correction terms ``c^-2k E_k`` one at a time
raises the decay rate by two each time.
"""

from nrlimit.harness import fit_rate, free_expansion_table

if __name__ == "__main__":
    cs = (4.0, 6.0, 8.0, 12.0)
    table = free_expansion_table(cs)
    print("terms removed   " + "  ".join(f"c={c:<8g}" for c in cs) + "  slope")
    for K, row in table.items():
        slope = fit_rate(cs, row)[0]
        print(f"{K:13d}   " + "  ".join(f"{r:<10.3e}" for r in row) + f"  {slope:.2f}")
    print("Expected slopes: -2, -4, -6, -8.")
