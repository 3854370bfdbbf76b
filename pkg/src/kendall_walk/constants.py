"""Validation thresholds. Changing any value here requires bumping VERSION."""

VERSION = "1"

KS_MAX = 0.005              # sup distance, empirical vs exact cdf
KS_COEF = 1.95              # ~0.1% critical value of sqrt(N) * KS; used when N < 1e6
BAND_JOINT_SIGMA = 3.0      # simulator joint frequencies vs exact fdd
BAND_FDD_SIGMA = 4.0        # fdd module Monte Carlo check

TOL_ALGEBRAIC = 1e-12       # exact identities evaluated two ways
TOL_ROUNDING = 1e-15        # identities that differ only in floating-point order
TOL_MULTIPLICATIVE = 1e-8   # quadrature transform of F_n vs G^n
TOL_ROUND_TRIP = 1e-6       # invert_to_cdf(G) vs F
TOL_MOMENT_LIMIT = 1e-6     # H(1e6) vs alpha-moment, relative
TOL_CHAPMAN_KOLMOGOROV = 1e-6
TOL_MARGINAL = 1e-8
TOL_KERNEL_CHAIN = 1e-5
TOL_NORMING = 1e-6
TOL_MONOTONE = 1e-12
QUAD_TOL = 1e-10
GENERIC_H_FACTOR = 10.0     # generic H within GENERIC_H_FACTOR * QUAD_TOL
CONVERGENCE_SLACK = 0.1

MC_SAMPLES = 1_000_000
MC_SAMPLES_QUICK = 100_000
