# Schwinger Representations
# Exact finite-dimensional quantum representations that reflect the factorization of M
