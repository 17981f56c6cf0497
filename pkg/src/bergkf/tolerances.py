# Numerical tolerances for binary64 arithmetic. Tests import these instead of
# hard-coding literals.

RING_RTOL = 1e-13
SERIES_RTOL = 1e-12
HERMITIAN_RTOL = 1e-12
FD_RTOL = 1e-6

KERNEL_SYMMETRY_RTOL = 1e-12
PUSHFORWARD_RTOL = 1e-10
INVERSE_ATOL = 1e-10
JACOBIAN_FD_RTOL = 1e-8
MOMENT_QUAD_RTOL = 1e-8

METRIC_HERMITIAN_ATOL = 1e-11
KAHLER_SYMMETRY_RTOL = 1e-9
KF_TWO_ROUTE_RTOL = 1e-9
EQUIVARIANCE_RTOL = 1e-9

SCALING_INVARIANT_ATOL = 1e-10
TANGENT_ATOL = 1e-10
STATIONARITY_ATOL = 1e-10

# relative truncation tail allowed before a series kernel is flagged
SERIES_TAIL_TOL = 1e-12

BALL_ORACLE_RTOL = 1e-8
