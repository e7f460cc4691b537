#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qdlab/potential.hpp"
#include "qdlab/torus.hpp"

namespace qdlab {

using cplx = std::complex<double>;

struct Mat2c {
    cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

    static Mat2c identity() { return {}; }
    static Mat2c one_step(double v, cplx z) { return {v - z, {-1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}; }

    Mat2c operator*(const Mat2c& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2c adjugate() const { return {d, -b, -c, a}; }
    cplx det() const { return a * d - b * c; }
    double frobenius2() const {
        return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    }
};

// Largest singular value, closed form via trace and determinant of M*M.
double spectral_norm(const Mat2c& m);

// A 2x2 matrix held as exp(log_mag) * unit with ||unit|| = 1. Renormalized
// after every factor, so arbitrarily long cocycle products never overflow.
struct LogScaledMatrix {
    Mat2c unit;
    double log_mag = 0.0;
    cplx det_phase{1.0, 0.0};  // det(true matrix) / |det(true matrix)|

    static LogScaledMatrix identity() { return {}; }
    static LogScaledMatrix from_matrix(const Mat2c& m);

    // accumulate m * (*this); assumes det(m) == 1
    void premultiply_sl2(const Mat2c& m);
    // accumulate (*this) * m; assumes det(m) == 1
    void postmultiply_sl2(const Mat2c& m);

    double log_abs_det() const;
    // valid when |det(true matrix)| = 1
    LogScaledMatrix inverse_unimodular() const;
    Mat2c reconstruct() const;  // requires log_mag < ~700
};

LogScaledMatrix operator*(const LogScaledMatrix& lhs, const LogScaledMatrix& rhs);

// Where the potential sampling starts along the orbit: the k-th factor of the
// n-step product reads the potential at T^k x (AtT1, the convention used
// throughout) or at T^{k-1} x (AtT0, for cross-comparison).
enum class SampleStart { AtT1, AtT0 };

inline constexpr long long kTransferStepCap = 100000000;  // 1e8

// n-step transfer matrix at spectral parameter z. Negative n gives the left
// cocycle A_{-m}(x) = (A_m(T^{-m} x))^{-1}.
LogScaledMatrix transfer(const Potential& f, const Dynamics& d, const TorusPoint& x,
                         cplx z, long long n, SampleStart start = SampleStart::AtT1);

// Same cocycle product over a caller-supplied sampling function.
LogScaledMatrix transfer_fn(const std::function<double(const TorusPoint&)>& pot,
                            const Dynamics& d, const TorusPoint& x, cplx z, long long n,
                            SampleStart start = SampleStart::AtT1);

// Product over an explicit value sequence: values[0] is the first (rightmost)
// factor. For operator windows and site-modified potentials.
LogScaledMatrix transfer_from_values(std::span<const double> values, cplx z);

struct LyapunovEstimate {
    cplx z;
    long long n = 0;
    double mean = 0.0;    // estimate of L_n
    double stderr_ = 0.0;
    long long num_phases = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo average of (1/n) ln||A_n(x)|| over uniform phases.
LyapunovEstimate lyapunov(const Potential& f, const Dynamics& d, cplx z, long long n,
                          long long num_phases, std::uint64_t seed);

// Richardson extrapolation of L_n over n in {125, 250, 500} against the
// model L_n = L + c/n. The working stand-in for the n -> infinity limit.
double lyapunov_reference(const Potential& f, const Dynamics& d, cplx z,
                          std::uint64_t seed, long long num_phases = 4000);

struct DeviationMeasure {
    double measure = 0.0;     // fraction of phases with (1/k) ln||A_k|| >= a_frac * L_ref
    double half_width = 0.0;  // binomial 95% half-width
    long long num_samples = 0;
    double threshold = 0.0;
};

DeviationMeasure deviation_measure(const Potential& f, const Dynamics& d, cplx z, long long k,
                                   double a_frac, double L_ref, long long num_samples,
                                   std::uint64_t seed);

// Level schedule 1 - tau/16 > a > c > d > 1 - tau/8 used by the
// approximation chain; defaults split the window with round margins.
struct InclusionParams {
    double tau = 0.75;
    double a = 0.0, c = 0.0, d = 0.0;
    static InclusionParams from_tau(double tau);
};

struct InclusionOptions {
    long long num_phases = 1000;
    std::uint64_t seed = 1;
    double L_ref = 0.0;       // <= 0: computed via lyapunov_reference
    double sched_eps = 0.05;  // exponent slack in the N0 / Taylor-degree schedule
    int degree_cap = 512;
};

struct InclusionReport {
    long long violations = 0;
    long long tested = 0;  // memberships implied and checked
    long long outer_hits = 0;
    long long mid_hits = 0;
    long long phases = 0;
    double L_ref = 0.0;
    int N0 = 0;
    int N1 = 0;
};

// Samples phases and checks the two-stage membership chain
//   {(1/k)ln||A_k^{f,E}|| >= a L} -> {... approximant, >= c L} -> {... f at z, >= d L}.
InclusionReport inclusion_check(const Potential& f, const Dynamics& d, double E, cplx z,
                                long long k, const InclusionParams& params,
                                const InclusionOptions& opts = {});

// Smallest 1 <= j <= j_max with (2/k) ln||A_k(T^j x)|| >= d_frac * L_ref.
std::optional<long long> growth_first_hit(const Potential& f, const Dynamics& d,
                                          const TorusPoint& x, cplx z, long long k,
                                          double d_frac, double L_ref, long long j_max);

struct ComparabilityReport {
    double exponent = 0.0;  // max |ln||A_n^{v2}|| - ln||A_n^{v1}||| / ln(1/eps)
    bool pass = false;
    double worst_E = 0.0, worst_eps = 0.0;
    long long worst_n = 0;
};

ComparabilityReport comparability_check(const Potential& f1, const Potential& f2,
                                        const Dynamics& d, const TorusPoint& x,
                                        std::span<const double> E_grid,
                                        std::span<const double> eps_grid, double A_fit);

// Same check over explicit site samplers v(k), k ranging over the signed
// window touched by |n| <= ln(1/eps); lets tests modify single orbit entries.
ComparabilityReport comparability_check_sampled(const std::function<double(long long)>& v1,
                                                const std::function<double(long long)>& v2,
                                                std::span<const double> E_grid,
                                                std::span<const double> eps_grid, double A_fit);

}  // namespace qdlab
