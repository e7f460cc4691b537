#include "qdlab/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>

namespace qdlab {

SpectralData diagonalize_tridiagonal(const std::vector<double>& diag, double offdiag) {
    const long long n = static_cast<long long>(diag.size());
    if (n < 1) throw std::invalid_argument("diagonalize_tridiagonal: empty diagonal");

    SpectralData sd;
    sd.n = n;
    sd.eigenvalues = diag;
    std::vector<double> e(static_cast<std::size_t>(n > 1 ? n - 1 : 1), offdiag);
    sd.eigenvectors.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);

    lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(n),
                                     sd.eigenvalues.data(), e.data(), sd.eigenvectors.data(),
                                     static_cast<lapack_int>(n));
    if (info != 0) throw std::runtime_error("diagonalize_tridiagonal: dstevd failed");
    return sd;
}

double SpectralData::max_residual(const std::vector<double>& diag, double offdiag) const {
    double worst = 0.0;
    for (long long j = 0; j < n; ++j) {
        double ev = eigenvalues[static_cast<std::size_t>(j)];
        for (long long i = 0; i < n; ++i) {
            double h = diag[static_cast<std::size_t>(i)] * vec(i, j);
            if (i > 0) h += offdiag * vec(i - 1, j);
            if (i + 1 < n) h += offdiag * vec(i + 1, j);
            worst = std::max(worst, std::abs(h - ev * vec(i, j)));
        }
    }
    return worst;
}

double SpectralData::max_orthonormality_defect() const {
    double worst = 0.0;
    for (long long j = 0; j < n; ++j) {
        for (long long l = j; l < n; ++l) {
            double dot = 0.0;
            for (long long i = 0; i < n; ++i) dot += vec(i, j) * vec(i, l);
            double target = (j == l) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(dot - target));
        }
    }
    return worst;
}

}  // namespace qdlab
