#pragma once

#include <vector>

namespace qdlab {

// Eigen-decomposition of a symmetric tridiagonal matrix with the given
// diagonal and constant off-diagonal. Vectors are stored column-major:
// vec(i, j) is component i of the j-th eigenvector.
struct SpectralData {
    long long n = 0;
    std::vector<double> eigenvalues;   // ascending
    std::vector<double> eigenvectors;  // n * n, column-major

    double vec(long long i, long long j) const {
        return eigenvectors[static_cast<std::size_t>(j * n + i)];
    }
    // max_j ||H phi_j - E_j phi_j||_inf for the tridiagonal H
    double max_residual(const std::vector<double>& diag, double offdiag) const;
    double max_orthonormality_defect() const;
};

SpectralData diagonalize_tridiagonal(const std::vector<double>& diag, double offdiag = 1.0);

}  // namespace qdlab
