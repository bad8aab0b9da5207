#include "swarmlab/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace {

double off_diagonal_norm(const SymMatrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = i + 1; j < m.n; ++j) s += m.at(i, j) * m.at(i, j);
    return std::sqrt(2.0 * s);
}

double frobenius_norm(const SymMatrix& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(SymMatrix m, double tol, int max_sweeps) {
    const int n = m.n;
    std::vector<double> V(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;

    const double threshold = tol * std::max(1.0, frobenius_norm(m));
    bool converged = n < 2;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        if (off_diagonal_norm(m) <= threshold) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
                double t;
                if (std::fabs(theta) > 1e150) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = m.at(p, p), aqq = m.at(q, q);
                m.at(p, p) = app - t * apq;
                m.at(q, q) = aqq + t * apq;
                m.at(p, q) = 0.0;
                m.at(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = m.at(k, p), akq = m.at(k, q);
                    m.at(k, p) = akp - s * (akq + tau * akp);
                    m.at(p, k) = m.at(k, p);
                    m.at(k, q) = akq + s * (akp - tau * akq);
                    m.at(q, k) = m.at(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V[static_cast<std::size_t>(k) * n + p];
                    const double vkq = V[static_cast<std::size_t>(k) * n + q];
                    V[static_cast<std::size_t>(k) * n + p] = vkp - s * (vkq + tau * vkp);
                    V[static_cast<std::size_t>(k) * n + q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
        if (off_diagonal_norm(m) <= threshold) converged = true;
    }
    if (!converged) throw NumericError("jacobi_eigen: no convergence within sweep limit");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return m.at(a, a) < m.at(b, b); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.assign(n, std::vector<double>(n, 0.0));
    for (int k = 0; k < n; ++k) {
        const int col = order[k];
        out.values[k] = m.at(col, col);
        for (int i = 0; i < n; ++i) out.vectors[k][i] = V[static_cast<std::size_t>(i) * n + col];
    }
    return out;
}

}  // namespace swarmlab
