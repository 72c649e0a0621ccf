"""Values frozen from brute-force reference runs (see oracles.py)."""

# d=2, l=4, exponential growth, basis ordered by (degree, lexicographic)
GRAM_BASIS_SIZE = 129
GRAM_DIRECT_MAX_DEVIATION = 1.587911374271348
GRAM_DIRECT_IDENTITY_BLOCK = 58
GRAM_DIRECT_IDENTITY_DEGREE = 10
GRAM_SPAM_MAX_DEVIATION = 2.99e-14

# exp(s1 + s2), truth order 64, exponential growth.
# level: (n_nodes, spam_err, direct_err, trunc_err); spam_err for l=5,6 sits
# below the reference's own rounding floor and is not frozen.
SWEEP_F2 = {
    2: (21, 5.5788873044574055e-05, 0.14989939509623595, 0.0006222877502354992),
    3: (73, 1.6408625055367223e-08, 0.16006914713144127, 5.18816380343286e-07),
    4: (221, 1.1002332185317514e-16, 0.16498731445933074, 5.598998806513833e-15),
    5: (609, None, 0.1674095671078917, 1.5109831707247691e-23),
}

# Largest direct-method coefficient where the exact expansion is zero.
# s1^10 s2^10: indices with an odd per-axis degree or a per-axis degree > 10.
DIRECT_F1_STRUCTURAL = {3: 0.00867, 5: 0.01998, 7: 0.02052}
# sin/cos main effects: mixed indices (both >= 2).
DIRECT_F3_MIXED = {3: 0.403, 5: 0.419, 7: 0.423}

# Acceptance thresholds derived from the values above.
DIRECT_GRAM_THRESHOLD = 1.0  # oracle max deviation 1.588
SWEEP_DROP_L3_L6 = 10.0
SWEEP_DIRECT_OVER_SPAM_L6 = 100.0
