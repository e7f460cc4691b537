#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qdlab/cocycle.hpp"
#include "qdlab/potential.hpp"
#include "qdlab/quantum.hpp"
#include "qdlab/torus.hpp"

namespace qdlab {

struct MomentSeries {
    double p = 0.0;
    std::vector<std::pair<double, double>> entries;  // (T, moment), T increasing
    std::string provenance;

    static MomentSeries create(double p, std::vector<std::pair<double, double>> entries,
                               std::string provenance);
    bool spans_three_decades() const;
};

// Which horizontal scale the slope is measured against: ln ln t for the
// power-logarithmic exponents, ln t for the classical power-law ones.
enum class TimeScale { LogLog, Log };

struct TransportEstimate {
    double beta_central = 0.0;   // least-squares slope over the full window
    double beta_log_plus = 0.0;  // max secant slope over the trailing half
    double beta_log_minus = 0.0; // min secant slope over the trailing half
    double residual = 0.0;       // RMS residual of the central fit
    std::pair<double, double> window{0.0, 0.0};
    TimeScale scale = TimeScale::LogLog;
};

// Slope of ln<moment> against p * lnln T (or p * ln T). The envelope slopes
// are finite-data stand-ins for the limsup / liminf.
TransportEstimate fit_beta_log(const MomentSeries& series, TimeScale scale = TimeScale::LogLog);

// Outside probability P(N, T) for one value of T, as a callable so synthetic
// decay laws can be tested alongside profile-backed ones.
struct OutsideSampler {
    double T = 0.0;
    std::function<double(long long)> P;
};

OutsideSampler sampler_from_profile(const AmplitudeProfile& prof);

struct SLogEstimate {
    double alpha = 0.0;
    double s_plus = 0.0;   // max of the per-sample decay rates (trailing half)
    double s_minus = 0.0;  // min of the per-sample decay rates (trailing half)
    double alpha_log_bound = 0.0;  // alpha when all samples were finite, else NaN
    long long infinite_samples = 0;
    long long finite_samples = 0;
};

// Per-sample rates -ln P((ln T)^alpha - 2, T) / lnln T. When the argument
// (ln T)^alpha - 2 is negative the probability is 1 by convention and the
// rate is exactly 0. Samples with P at machine zero are reported as infinite
// and excluded from the envelope.
SLogEstimate fit_s_log(const std::vector<OutsideSampler>& samplers, double alpha);

// Largest alpha in the grid whose samples are all finite (0 qualifies always).
double alpha_log_scan(const std::vector<OutsideSampler>& samplers, std::span<const double> alphas);

struct DtOptions {
    int panels = 1024;
    bool refine = true;
    long long phase_samples = 1;  // > 1 probes the infimum over phases
    std::uint64_t seed = 1;
    double xi_probe = 1.0;
};

struct DtIntegral {
    double value = 0.0;
    long long N_used = 0;
    double K = 0.0;
    double min_growth_exponent = 0.0;  // min over E of max-growth / ln T
    double frac_xi_satisfied = 0.0;    // fraction of panels with growth >= xi_probe * ln T
    long long evals = 0;
};

// Integral over E in [-K, K] of 1 / min_{dir} max_{1 <= j <= N} ||A_j(E + i/T)||^2
// with N = ceil((ln T)^gamma). Composite midpoint rule with one adaptive
// refinement pass where the integrand exceeds 10x its median.
DtIntegral dt_integral(const Potential& f, const Dynamics& d, const TorusPoint& x, double T,
                       double gamma, double K, const DtOptions& opts = {});

struct DtOutsideBound {
    double bound = 0.0;      // exp_term + integral_term
    double exp_term = 0.0;   // e^{-N}
    double integral_term = 0.0;  // T^3 * integral value
    DtIntegral integral;
};

DtOutsideBound dt_outside_bound(const Potential& f, const Dynamics& d, const TorusPoint& x,
                                double T, double gamma, double K, const DtOptions& opts = {});

// Ordinary least squares of y against u; returns (slope, intercept, rms).
struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = 0.0;
};
LineFit least_squares(std::span<const double> u, std::span<const double> y);

}  // namespace qdlab
