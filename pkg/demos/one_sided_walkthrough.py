#!/usr/bin/env python3
# Walkthrough of the one-sided secure scheme with 4 servers where any 2
# may collude: split A into 2 blocks, mask with 2 uniform keys, and pay
# exactly half the download for the privacy.

import random

from smm import (
    AnswerSet,
    FieldMatrix,
    PartitionSpec,
    PrimeField,
    ROW_WISE,
    achievable_rate,
    decode,
    encode,
    partition,
    plan_one_sided,
    server_compute,
)

field = PrimeField(101)
plan = plan_one_sided(4, 2, field)
print("scheme: one-sided, N=4 servers, l=2 colluding, q=101")
print("evaluation points:", plan.eval_points)
print("term exponents (A1, A2 data, then K1, K2 keys):", plan.a_exponents)
print("rate:", achievable_rate(plan))

rng = random.Random(7)
A = FieldMatrix.from_rows(field, [[3, 1, 4], [1, 5, 9], [2, 6, 5], [3, 5, 8]])
B = FieldMatrix.from_rows(field, [[9, 7], [9, 3], [2, 3]])
print("\nA =", A.to_rows())
print("B =", B.to_rows(), "(public, every server knows it)")

share_set = encode(plan, A, B, rng)
A1, A2 = partition(A, PartitionSpec(ROW_WISE, 2))
K1, K2 = share_set.a_keys
print("\nA splits into row blocks A1 =", A1.to_rows(), "A2 =", A2.to_rows())
print("fresh uniform keys K1 =", K1.to_rows(), "K2 =", K2.to_rows())

# share for server i is the polynomial A1 + A2 x + K1 x^2 + K2 x^3 at x=i
for i, share in enumerate(share_set.shares, start=1):
    print(f"server {i} receives A~{i} =", share.a.to_rows())

# any two shares are two evaluations of a degree-3 polynomial whose top
# two coefficients are independent uniform keys: statistically
# independent of A (demos/leakage_audit.py certifies this by counting)

answers = {
    i: server_compute(share, share_set.public_b)
    for i, share in enumerate(share_set.shares, start=1)
}
print("\nanswers Z_i = A~_i B:")
for i, z in answers.items():
    print(f"  Z_{i} =", z.to_rows())

# four answers = four evaluations of h(x) = A1B + A2B x + K1B x^2 + K2B x^3;
# interpolation recovers the two low-degree coefficients, i.e. AB
product = decode(plan, AnswerSet(answers, A.rows, B.cols))
print("\ndecoded AB =", product.to_rows())
print("matches direct multiplication:", product == A @ B)
print("downloaded 4 blocks to learn 2: rate", achievable_rate(plan))
