"""One-sided Welch t-tests (H1: mean(a) < mean(b)) from scipy.

    python3 tests/oracle/welch_oracle.py
"""

from scipy import stats

CASES = [
    ([0.61, 0.60, 0.63, 0.65, 0.60, 0.62], [0.70, 0.66, 0.75, 0.68, 0.72]),
    ([1.0, 2.0, 3.0, 4.0], [1.5, 2.5, 2.0, 9.0, 4.0, 3.0, 2.0]),
    ([0.9, 0.8, 1.1], [0.2, 0.3, 0.25, 0.4]),
]

for a, b in CASES:
    r = stats.ttest_ind(a, b, equal_var=False, alternative="less")
    va, vb = stats.tvar(a) / len(a), stats.tvar(b) / len(b)
    df = (va + vb) ** 2 / (va**2 / (len(a) - 1) + vb**2 / (len(b) - 1))
    print(f"t={r.statistic:.17g} df={df:.17g} p={r.pvalue:.17g}")
