#pragma once

#include <cmath>
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "mfgpdi/linalg.hpp"

namespace mfgpdi::oracle {

// Dense Gaussian elimination with partial pivoting, written out by hand so it
// shares nothing with the sparse solver under test.
inline Vector dense_solve(Eigen::MatrixXd a, Vector b)
{
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) {
                piv = i;
            }
        }
        a.row(k).swap(a.row(piv));
        std::swap(b[k], b[piv]);
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (Eigen::Index j = k; j < n; ++j) {
                a(i, j) -= f * a(k, j);
            }
            b[i] -= f * b[k];
        }
    }
    Vector x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            s -= a(i, j) * x[j];
        }
        x[i] = s / a(i, i);
    }
    return x;
}

// Random sparse matrix with a dominant diagonal, so it is safely nonsingular.
inline SparseMatrix random_sparse(int n, double density, std::mt19937& rng)
{
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    TripletBuffer buf(n, n);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i != j && coin(rng) < density) {
                const double v = val(rng);
                buf.add(i, j, v);
                row += std::abs(v);
            }
        }
        buf.add(i, i, row + 1.0 + coin(rng));
    }
    return compress(buf);
}

} // namespace mfgpdi::oracle
