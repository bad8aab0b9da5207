#pragma once

#include <cstddef>
#include <vector>

namespace swarmlab {

/// Dense symmetric matrix, row-major. Sized for swarm-scale problems (n <= ~100).
struct SymMatrix {
    int n = 0;
    std::vector<double> a;

    SymMatrix() = default;
    explicit SymMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct EigenDecomposition {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k], unit norm
};

/// Cyclic Jacobi sweeps. Converged when the off-diagonal Frobenius norm drops
/// below tol * max(1, ||A||_F). Throws NumericError if max_sweeps is exhausted.
EigenDecomposition jacobi_eigen(SymMatrix m, double tol = 1e-12, int max_sweeps = 100);

}  // namespace swarmlab
