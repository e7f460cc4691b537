#include "qdlab/transport.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdlab/parallel.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {

LineFit least_squares(std::span<const double> u, std::span<const double> y) {
    if (u.size() != y.size() || u.size() < 2)
        throw std::invalid_argument("least_squares: need >= 2 matching samples");
    double n = double(u.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        sx += u[i];
        sy += y[i];
        sxx += u[i] * u[i];
        sxy += u[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double r = y[i] - (fit.intercept + fit.slope * u[i]);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

MomentSeries MomentSeries::create(double p, std::vector<std::pair<double, double>> entries,
                                  std::string provenance) {
    if (p < 0.0) throw std::invalid_argument("MomentSeries: p must be >= 0");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(entries[i].first > 0.0)) throw std::invalid_argument("MomentSeries: T must be > 0");
        if (i > 0 && !(entries[i].first > entries[i - 1].first))
            throw std::invalid_argument("MomentSeries: T must be strictly increasing");
        if (entries[i].second < 1.0 - 1e-8)
            throw std::invalid_argument("MomentSeries: moment below the unit-mass floor");
    }
    MomentSeries s;
    s.p = p;
    s.entries = std::move(entries);
    s.provenance = std::move(provenance);
    return s;
}

bool MomentSeries::spans_three_decades() const {
    if (entries.size() < 2) return false;
    return entries.back().first / entries.front().first >= 1e3;
}

TransportEstimate fit_beta_log(const MomentSeries& series, TimeScale scale) {
    if (series.entries.size() < 6)
        throw std::invalid_argument("fit_beta_log: need at least 6 samples");
    if (!(series.p > 0.0)) throw std::invalid_argument("fit_beta_log: p must be > 0");
    if (!(series.entries.front().first >= 10.0))
        throw std::invalid_argument("fit_beta_log: T_min must be >= 10 so lnln T > 0");

    std::vector<double> u, y;
    for (const auto& [T, M] : series.entries) {
        double base = scale == TimeScale::LogLog ? std::log(std::log(T)) : std::log(T);
        u.push_back(series.p * base);
        y.push_back(std::log(M));
    }
    LineFit fit = least_squares(u, y);

    TransportEstimate est;
    est.scale = scale;
    est.beta_central = fit.slope;
    est.residual = fit.rms;
    est.window = {series.entries.front().first, series.entries.back().first};

    std::size_t start = series.entries.size() / 2;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < u.size(); ++i) {
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            double sec = (y[j] - y[i]) / (u[j] - u[i]);
            hi = std::max(hi, sec);
            lo = std::min(lo, sec);
        }
    }
    if (!std::isfinite(hi)) {  // fewer than 2 points in the trailing half
        hi = fit.slope;
        lo = fit.slope;
    }
    est.beta_log_plus = hi;
    est.beta_log_minus = lo;
    return est;
}

OutsideSampler sampler_from_profile(const AmplitudeProfile& prof) {
    if (!prof.valid) throw std::invalid_argument("sampler_from_profile: invalid profile");
    OutsideSampler s;
    s.T = prof.T;
    s.P = [prof](long long N) -> double {
        if (N >= prof.L) return 0.0;  // beyond a leak-free window
        return outside_probability(prof, N).P;
    };
    return s;
}

SLogEstimate fit_s_log(const std::vector<OutsideSampler>& samplers, double alpha) {
    if (samplers.empty()) throw std::invalid_argument("fit_s_log: no samples");
    if (alpha < 0.0) throw std::invalid_argument("fit_s_log: alpha must be >= 0");

    SLogEstimate est;
    est.alpha = alpha;
    std::vector<double> rates;  // aligned with samplers; NaN marks infinite
    for (const auto& smp : samplers) {
        if (!(smp.T > std::exp(1.0)))
            throw std::invalid_argument("fit_s_log: need T > e so lnln T > 0");
        double arg = std::pow(std::log(smp.T), alpha) - 2.0;
        double rate;
        if (arg < 0.0) {
            rate = 0.0;  // P = 1 by convention
        } else {
            double P = smp.P(static_cast<long long>(std::floor(arg)));
            if (!(P >= DBL_MIN)) {
                rates.push_back(std::numeric_limits<double>::quiet_NaN());
                ++est.infinite_samples;
                continue;
            }
            rate = -std::log(P) / std::log(std::log(smp.T));
        }
        rates.push_back(rate);
        ++est.finite_samples;
    }

    std::size_t start = rates.size() / 2;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < rates.size(); ++i) {
        if (std::isnan(rates[i])) continue;
        hi = std::max(hi, rates[i]);
        lo = std::min(lo, rates[i]);
    }
    if (!std::isfinite(hi)) {
        hi = std::numeric_limits<double>::infinity();
        lo = std::numeric_limits<double>::infinity();
    }
    est.s_plus = hi;
    est.s_minus = lo;
    est.alpha_log_bound = est.infinite_samples == 0
                              ? alpha
                              : std::numeric_limits<double>::quiet_NaN();
    return est;
}

double alpha_log_scan(const std::vector<OutsideSampler>& samplers, std::span<const double> alphas) {
    double best = 0.0;  // alpha = 0 always yields the rate 0
    for (double a : alphas) {
        SLogEstimate est = fit_s_log(samplers, a);
        if (est.infinite_samples == 0) best = std::max(best, a);
    }
    return best;
}

namespace {

struct SampledOrbitPotential {
    std::vector<double> forward;   // v_t = f(T^t x), t = 1..N
    std::vector<double> backward;  // v_{-t} = f(T^{-t} x), t = 0..N-1
};

SampledOrbitPotential sample_orbit_potential(const Potential& f, const Dynamics& d,
                                             const TorusPoint& x, long long N) {
    SampledOrbitPotential s;
    s.forward.resize(static_cast<std::size_t>(N));
    s.backward.resize(static_cast<std::size_t>(N));
    TorusPoint y = x;
    for (long long t = 0; t < N; ++t) {
        y = step(d, y);
        s.forward[static_cast<std::size_t>(t)] = f.eval(y);
    }
    y = x;
    for (long long t = 0; t < N; ++t) {
        s.backward[static_cast<std::size_t>(t)] = f.eval(y);
        y = step_inverse(d, y);
    }
    return s;
}

// min over the two directions of max_{1 <= j <= N} 2 ln||A_j(E + i/T)||
double direction_min_max_growth(const SampledOrbitPotential& v, cplx z) {
    LogScaledMatrix fwd = LogScaledMatrix::identity();
    double max_f = -std::numeric_limits<double>::infinity();
    for (double vk : v.forward) {
        fwd.premultiply_sl2(Mat2c::one_step(vk, z));
        max_f = std::max(max_f, 2.0 * fwd.log_mag);
    }
    // ||A_{-j}(x)|| equals the norm of the reversed product built by
    // right-multiplication, since the inverse of a unimodular 2x2 matrix
    // has the same spectral norm
    LogScaledMatrix bwd = LogScaledMatrix::identity();
    double max_b = -std::numeric_limits<double>::infinity();
    for (double vk : v.backward) {
        bwd.postmultiply_sl2(Mat2c::one_step(vk, z));
        max_b = std::max(max_b, 2.0 * bwd.log_mag);
    }
    return std::min(max_f, max_b);
}

}  // namespace

DtIntegral dt_integral(const Potential& f, const Dynamics& d, const TorusPoint& x, double T,
                       double gamma, double K, const DtOptions& opts) {
    if (!(T >= 10.0)) throw std::invalid_argument("dt_integral: T must be >= 10");
    if (!(gamma > 1.0)) throw std::invalid_argument("dt_integral: gamma must be > 1");
    if (!(K > 0.0)) throw std::invalid_argument("dt_integral: K must be > 0");
    if (opts.panels < 2) throw std::invalid_argument("dt_integral: need >= 2 panels");

    DtIntegral out;
    out.K = K;
    out.N_used = static_cast<long long>(std::ceil(std::pow(std::log(T), gamma)));

    std::vector<SampledOrbitPotential> phases;
    phases.push_back(sample_orbit_potential(f, d, x, out.N_used));
    for (long long s = 1; s < opts.phase_samples; ++s) {
        TorusPoint xs = TorusPoint::zero(d.dim());
        for (int j = 0; j < d.dim(); ++j)
            xs.coords[static_cast<std::size_t>(j)] =
                rng::uniform01(opts.seed, 7 * 64 + static_cast<std::uint64_t>(j),
                               static_cast<std::uint64_t>(s)) -
                0.5;
        phases.push_back(sample_orbit_potential(f, d, xs, out.N_used));
    }

    const double lnT = std::log(T);
    auto growth_at = [&](double E) -> double {
        cplx z(E, 1.0 / T);
        double g = std::numeric_limits<double>::infinity();
        for (const auto& ph : phases) g = std::min(g, direction_min_max_growth(ph, z));
        return g;
    };

    const int P = opts.panels;
    const double h = 2.0 * K / double(P);
    std::vector<double> growth(static_cast<std::size_t>(P));
    const bool parallel = par::enabled();
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < P; ++i)
        growth[static_cast<std::size_t>(i)] = growth_at(-K + (double(i) + 0.5) * h);
    out.evals += P;

    std::vector<double> vals(static_cast<std::size_t>(P));
    for (int i = 0; i < P; ++i) vals[static_cast<std::size_t>(i)] = std::exp(-growth[static_cast<std::size_t>(i)]);

    double integral = 0.0;
    for (double v : vals) integral += h * v;

    out.min_growth_exponent = std::numeric_limits<double>::infinity();
    long long satisfied = 0;
    for (double g : growth) {
        out.min_growth_exponent = std::min(out.min_growth_exponent, g / lnT);
        if (g >= opts.xi_probe * lnT) ++satisfied;
    }
    out.frac_xi_satisfied = double(satisfied) / double(P);

    if (opts.refine) {
        std::vector<double> sorted = vals;
        std::nth_element(sorted.begin(), sorted.begin() + P / 2, sorted.end());
        double median = sorted[static_cast<std::size_t>(P / 2)];
        double cutoff = 10.0 * median;
        std::vector<int> flagged;
        for (int i = 0; i < P; ++i)
            if (vals[static_cast<std::size_t>(i)] > cutoff) flagged.push_back(i);
        std::vector<double> refined(flagged.size() * 4);
#pragma omp parallel for schedule(static) if (parallel)
        for (long long fi = 0; fi < static_cast<long long>(flagged.size()); ++fi) {
            int i = flagged[static_cast<std::size_t>(fi)];
            double left = -K + double(i) * h;
            for (int q = 0; q < 4; ++q) {
                double E = left + (double(q) + 0.5) * h / 4.0;
                refined[static_cast<std::size_t>(fi * 4 + q)] = std::exp(-growth_at(E));
            }
        }
        out.evals += 4 * static_cast<long long>(flagged.size());
        for (std::size_t fi = 0; fi < flagged.size(); ++fi) {
            int i = flagged[fi];
            double sub = 0.0;
            for (int q = 0; q < 4; ++q) sub += refined[fi * 4 + static_cast<std::size_t>(q)];
            integral += -h * vals[static_cast<std::size_t>(i)] + (h / 4.0) * sub;
        }
    }

    out.value = integral;
    return out;
}

DtOutsideBound dt_outside_bound(const Potential& f, const Dynamics& d, const TorusPoint& x,
                                double T, double gamma, double K, const DtOptions& opts) {
    DtOutsideBound out;
    out.integral = dt_integral(f, d, x, T, gamma, K, opts);
    out.exp_term = std::exp(-double(out.integral.N_used));
    out.integral_term = T * T * T * out.integral.value;
    out.bound = out.exp_term + out.integral_term;
    return out;
}

}  // namespace qdlab
