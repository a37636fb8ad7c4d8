"""Jones polynomial at the fifth root of unity from two-qubit DQC1 runs.

Three-strand braids are represented with the Fibonacci anyon matrices. The
2x2 upper and lower blocks of the braid matrix are compiled separately and
their traces combined; the result is a (phase-normalized) Jones value, so
braids closing to the same link give the same number.
"""

from dqc1bench import NoiseModel
from dqc1bench.knots import (
    TABLE_PAIRS,
    BraidWord,
    block_circuits,
    estimate_jones,
    jones_oracle,
    knot_distance,
)
from dqc1bench.circuit import cnot_count

for text in ("S12^3", "S23^3", "S12 S23inv S12 S23inv"):
    w = BraidWord.parse(text)
    up, lo = block_circuits(w)
    print(f"{text:22s} exact={jones_oracle(w):.4f}  CNOTs upper/lower={cnot_count(up)}/{cnot_count(lo)}")

print("\ndistances between braid words (exact vs reference table)")
for w1, w2, ref in TABLE_PAIRS:
    d = abs(jones_oracle(BraidWord.parse(w1)) - jones_oracle(BraidWord.parse(w2)))
    print(f"  |V({w1}) - V({w2})| = {d:.3f}   table {ref}")

print("\nnoisy estimates: S12^3 and S23^3 close to the same knot but compile differently")
m = NoiseModel()
e1 = estimate_jones(BraidWord.parse("S12^3"), m, 4096, 12, "Q1-Q0", seed=0)
e2 = estimate_jones(BraidWord.parse("S23^3"), m, 4096, 12, "Q1-Q0", seed=0)
d, err = knot_distance(e1, e2)
print(f"  S12^3 -> {e1.mean:.3f}   S23^3 -> {e2.mean:.3f}   distance {d:.3f} ± {err:.3f}")
