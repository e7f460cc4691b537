#include "qdlab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdlab/parallel.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {

double spectral_norm(const Mat2c& m) {
    double t = m.frobenius2();
    double dd = std::norm(m.det());  // |det|^2
    double disc = t * t - 4.0 * dd;
    if (disc < 0.0) disc = 0.0;
    return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

LogScaledMatrix LogScaledMatrix::from_matrix(const Mat2c& m) {
    double s = spectral_norm(m);
    if (!(s > 0.0)) throw std::invalid_argument("LogScaledMatrix: zero matrix");
    LogScaledMatrix out;
    double inv = 1.0 / s;
    out.unit = {m.a * inv, m.b * inv, m.c * inv, m.d * inv};
    out.log_mag = std::log(s);
    cplx det = m.det();
    double ad = std::abs(det);
    out.det_phase = ad > 0.0 ? det / ad : cplx(1.0, 0.0);
    return out;
}

void LogScaledMatrix::premultiply_sl2(const Mat2c& m) {
    Mat2c u = m * unit;
    double s = spectral_norm(u);
    double inv = 1.0 / s;
    unit = {u.a * inv, u.b * inv, u.c * inv, u.d * inv};
    log_mag += std::log(s);
}

void LogScaledMatrix::postmultiply_sl2(const Mat2c& m) {
    Mat2c u = unit * m;
    double s = spectral_norm(u);
    double inv = 1.0 / s;
    unit = {u.a * inv, u.b * inv, u.c * inv, u.d * inv};
    log_mag += std::log(s);
}

double LogScaledMatrix::log_abs_det() const {
    return 2.0 * log_mag + std::log(std::abs(unit.det()));
}

LogScaledMatrix LogScaledMatrix::inverse_unimodular() const {
    // A = e^L U with |det A| = 1, so A^{-1} = e^L adj(U) / det_phase and
    // adj(U) has the same spectral norm as U.
    LogScaledMatrix out;
    Mat2c adj = unit.adjugate();
    cplx ph = det_phase;
    out.unit = {adj.a / ph, adj.b / ph, adj.c / ph, adj.d / ph};
    out.log_mag = log_mag;
    out.det_phase = cplx(1.0, 0.0) / ph;
    return out;
}

Mat2c LogScaledMatrix::reconstruct() const {
    if (log_mag > 700.0) throw std::overflow_error("LogScaledMatrix::reconstruct: magnitude too large");
    double s = std::exp(log_mag);
    return {unit.a * s, unit.b * s, unit.c * s, unit.d * s};
}

LogScaledMatrix operator*(const LogScaledMatrix& lhs, const LogScaledMatrix& rhs) {
    Mat2c u = lhs.unit * rhs.unit;
    double s = spectral_norm(u);
    LogScaledMatrix out;
    double inv = 1.0 / s;
    out.unit = {u.a * inv, u.b * inv, u.c * inv, u.d * inv};
    out.log_mag = lhs.log_mag + rhs.log_mag + std::log(s);
    cplx ph = lhs.det_phase * rhs.det_phase;
    double ad = std::abs(ph);
    out.det_phase = ad > 0.0 ? ph / ad : cplx(1.0, 0.0);
    return out;
}

LogScaledMatrix transfer_fn(const std::function<double(const TorusPoint&)>& pot,
                            const Dynamics& d, const TorusPoint& x, cplx z, long long n,
                            SampleStart start) {
    if (n == 0) return LogScaledMatrix::identity();
    if (std::llabs(n) > kTransferStepCap)
        throw std::invalid_argument("transfer: step count exceeds cap");

    if (n > 0) {
        LogScaledMatrix acc = LogScaledMatrix::identity();
        TorusPoint y = x;
        if (start == SampleStart::AtT1) y = step(d, y);
        for (long long k = 1; k <= n; ++k) {
            double v = pot(y);
            if (!std::isfinite(v)) throw std::runtime_error("transfer: non-finite potential value");
            acc.premultiply_sl2(Mat2c::one_step(v, z));
            if (k < n) y = step(d, y);
        }
        return acc;
    }

    // A_{-m}(x) = (A_m(T^{-m} x))^{-1}; the forward product from T^{-m} x
    // reads the potential at x, T^{-1} x, ..., built by right-multiplication.
    long long m = -n;
    LogScaledMatrix acc = LogScaledMatrix::identity();
    TorusPoint y = x;
    if (start == SampleStart::AtT0) y = step_inverse(d, y);
    for (long long k = 0; k < m; ++k) {
        double v = pot(y);
        if (!std::isfinite(v)) throw std::runtime_error("transfer: non-finite potential value");
        acc.postmultiply_sl2(Mat2c::one_step(v, z));
        if (k + 1 < m) y = step_inverse(d, y);
    }
    return acc.inverse_unimodular();
}

LogScaledMatrix transfer(const Potential& f, const Dynamics& d, const TorusPoint& x, cplx z,
                         long long n, SampleStart start) {
    return transfer_fn([&f](const TorusPoint& p) { return f.eval(p); }, d, x, z, n, start);
}

LogScaledMatrix transfer_from_values(std::span<const double> values, cplx z) {
    LogScaledMatrix acc = LogScaledMatrix::identity();
    for (double v : values) acc.premultiply_sl2(Mat2c::one_step(v, z));
    return acc;
}

namespace {

TorusPoint random_phase(int dim, std::uint64_t seed, std::uint64_t stream, std::uint64_t i) {
    TorusPoint x = TorusPoint::zero(dim);
    for (int j = 0; j < dim; ++j)
        x.coords[static_cast<std::size_t>(j)] =
            rng::uniform01(seed, stream * 64 + static_cast<std::uint64_t>(j), i) - 0.5;
    return x;
}

}  // namespace

LyapunovEstimate lyapunov(const Potential& f, const Dynamics& d, cplx z, long long n,
                          long long num_phases, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("lyapunov: n must be >= 1");
    if (num_phases < 2) throw std::invalid_argument("lyapunov: num_phases must be >= 2");

    std::vector<double> vals(static_cast<std::size_t>(num_phases));
    const bool parallel = par::enabled();
#pragma omp parallel for schedule(static) if (parallel)
    for (long long i = 0; i < num_phases; ++i) {
        TorusPoint x = random_phase(d.dim(), seed, 0, static_cast<std::uint64_t>(i));
        vals[static_cast<std::size_t>(i)] = transfer(f, d, x, z, n).log_mag / double(n);
    }

    double sum = 0.0;
    for (double v : vals) sum += v;
    double mean = sum / double(num_phases);
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / double(num_phases - 1));

    LyapunovEstimate est;
    est.z = z;
    est.n = n;
    est.mean = mean;
    est.stderr_ = sd / std::sqrt(double(num_phases));
    est.num_phases = num_phases;
    est.seed = seed;
    return est;
}

double lyapunov_reference(const Potential& f, const Dynamics& d, cplx z, std::uint64_t seed,
                          long long num_phases) {
    const long long ns[3] = {125, 250, 500};
    double L[3];
    for (int i = 0; i < 3; ++i) L[i] = lyapunov(f, d, z, ns[i], num_phases, seed + i).mean;
    // least squares for L_n = L + c/n over the three points
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 3; ++i) {
        double u = 1.0 / double(ns[i]);
        sx += u;
        sy += L[i];
        sxx += u * u;
        sxy += u * L[i];
    }
    double denom = 3.0 * sxx - sx * sx;
    double slope = (3.0 * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / 3.0;
    return std::max(intercept, 0.0);
}

DeviationMeasure deviation_measure(const Potential& f, const Dynamics& d, cplx z, long long k,
                                   double a_frac, double L_ref, long long num_samples,
                                   std::uint64_t seed) {
    if (!(L_ref > 0.0)) throw std::invalid_argument("deviation_measure: L_ref must be > 0");
    if (k < 1 || num_samples < 1) throw std::invalid_argument("deviation_measure: bad k or sample count");

    const double threshold = a_frac * L_ref;
    long long hits = 0;
    const bool parallel = par::enabled();
#pragma omp parallel for schedule(static) reduction(+ : hits) if (parallel)
    for (long long i = 0; i < num_samples; ++i) {
        TorusPoint x = random_phase(d.dim(), seed, 1, static_cast<std::uint64_t>(i));
        double g = transfer(f, d, x, z, k).log_mag / double(k);
        if (g >= threshold) ++hits;
    }

    DeviationMeasure out;
    out.num_samples = num_samples;
    out.threshold = threshold;
    out.measure = double(hits) / double(num_samples);
    out.half_width = 1.96 * std::sqrt(std::max(out.measure * (1.0 - out.measure), 1e-12) /
                                      double(num_samples));
    return out;
}

InclusionParams InclusionParams::from_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("InclusionParams: tau must be in (0,1)");
    InclusionParams p;
    p.tau = tau;
    p.a = 1.0 - tau / 15.0;
    p.c = 1.0 - tau / 12.0;
    p.d = 1.0 - tau / 9.0;
    return p;
}

InclusionReport inclusion_check(const Potential& f, const Dynamics& d, double E, cplx z,
                                long long k, const InclusionParams& params,
                                const InclusionOptions& opts) {
    if (k < 1) throw std::invalid_argument("inclusion_check: k must be >= 1");
    if (!(params.a > params.c && params.c > params.d))
        throw std::invalid_argument("inclusion_check: need a > c > d");

    InclusionReport rep;
    rep.L_ref = opts.L_ref > 0.0 ? opts.L_ref
                                 : lyapunov_reference(f, d, cplx(E, 0.0), opts.seed);
    if (!(rep.L_ref > 0.0)) throw std::invalid_argument("inclusion_check: L_ref must be positive");

    double sup = std::max(f.sup_norm_bound(), 1e-12);
    double edge = std::exp(-params.tau * double(k) * rep.L_ref / sup);
    if (!(std::abs(z - cplx(E, 0.0)) < edge))
        throw std::invalid_argument("inclusion_check: |E - z| outside the admissible window");

    double sigma_eff = f.kind() == PotentialKind::GevreyModel ? f.sigma() : 1.0;
    int N0 = static_cast<int>(std::ceil(std::pow(double(k), sigma_eff + opts.sched_eps)));
    CertifiedApprox trunc = truncate_fourier(f, N0);
    double tol = std::exp(-std::pow(double(k), 1.0 + opts.sched_eps));
    CertifiedApprox tilde = polynomialize(trunc, std::max(tol, 1e-280), opts.degree_cap);
    rep.N0 = N0;
    rep.N1 = tilde.N1;
    rep.phases = opts.num_phases;

    const double aL = params.a * rep.L_ref;
    const double cL = params.c * rep.L_ref;
    const double dL = rep.L_ref * params.d;
    auto tilde_eval = [&tilde](const TorusPoint& p) { return tilde.eval(p); };

    long long violations = 0, tested = 0, outer = 0, mid = 0;
    const bool parallel = par::enabled();
#pragma omp parallel for schedule(static) reduction(+ : violations, tested, outer, mid) if (parallel)
    for (long long i = 0; i < opts.num_phases; ++i) {
        TorusPoint x = random_phase(d.dim(), opts.seed, 2, static_cast<std::uint64_t>(i));
        double g_f = transfer(f, d, x, cplx(E, 0.0), k).log_mag / double(k);
        double g_tilde = transfer_fn(tilde_eval, d, x, cplx(E, 0.0), k).log_mag / double(k);
        if (g_f >= aL) {
            ++outer;
            ++tested;
            if (g_tilde < cL) ++violations;
        }
        if (g_tilde >= cL) {
            ++mid;
            ++tested;
            double g_z = transfer(f, d, x, z, k).log_mag / double(k);
            if (g_z < dL) ++violations;
        }
    }
    rep.violations = violations;
    rep.tested = tested;
    rep.outer_hits = outer;
    rep.mid_hits = mid;
    return rep;
}

std::optional<long long> growth_first_hit(const Potential& f, const Dynamics& d,
                                          const TorusPoint& x, cplx z, long long k,
                                          double d_frac, double L_ref, long long j_max) {
    if (j_max < 1) throw std::invalid_argument("growth_first_hit: j_max must be >= 1");
    if (k < 1) throw std::invalid_argument("growth_first_hit: k must be >= 1");

    const double threshold = d_frac * L_ref;
    // potential samples v_t = f(T^t x) for t = 1 .. j_max + k; the block at
    // shift j uses v_{j+1} .. v_{j+k}
    std::vector<double> v(static_cast<std::size_t>(j_max + k));
    {
        TorusPoint y = x;
        for (long long t = 0; t < j_max + k; ++t) {
            y = step(d, y);
            v[static_cast<std::size_t>(t)] = f.eval(y);
        }
    }

    const long long chunk = 1024;
    const long long num_chunks = (j_max + chunk - 1) / chunk;
    const bool parallel = par::enabled();
    long long found = j_max + 1;
#pragma omp parallel for schedule(static) reduction(min : found) if (parallel)
    for (long long cidx = 0; cidx < num_chunks; ++cidx) {
        long long jb = cidx * chunk + 1;
        long long je = std::min(j_max, jb + chunk - 1);
        for (long long j = jb; j <= je; ++j) {
            auto block = std::span<const double>(v).subspan(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
            double g = 2.0 * transfer_from_values(block, z).log_mag / double(k);
            if (g >= threshold) {
                found = std::min(found, j);
                break;
            }
        }
    }
    if (found <= j_max) return found;
    return std::nullopt;
}

namespace {

ComparabilityReport comparability_core(const std::function<LogScaledMatrix(cplx, long long)>& A1,
                                       const std::function<LogScaledMatrix(cplx, long long)>& A2,
                                       std::span<const double> E_grid,
                                       std::span<const double> eps_grid, double A_fit) {
    if (E_grid.empty() || eps_grid.empty())
        throw std::invalid_argument("comparability_check: empty grid");
    ComparabilityReport rep;
    for (double eps : eps_grid) {
        if (!(eps > 0.0 && eps <= 1.0))
            throw std::invalid_argument("comparability_check: eps must lie in (0, 1]");
        long long n_max = static_cast<long long>(std::floor(std::log(1.0 / eps)));
        double leps = std::log(1.0 / eps);
        if (n_max < 1) continue;
        for (double E : E_grid) {
            cplx zz(E, eps);
            for (long long n = -n_max; n <= n_max; ++n) {
                if (n == 0) continue;
                double l1 = A1(zz, n).log_mag;
                double l2 = A2(zz, n).log_mag;
                double ratio = std::abs(l2 - l1) / leps;
                if (ratio > rep.exponent) {
                    rep.exponent = ratio;
                    rep.worst_E = E;
                    rep.worst_eps = eps;
                    rep.worst_n = n;
                }
            }
        }
    }
    rep.pass = rep.exponent <= A_fit;
    return rep;
}

}  // namespace

ComparabilityReport comparability_check(const Potential& f1, const Potential& f2,
                                        const Dynamics& d, const TorusPoint& x,
                                        std::span<const double> E_grid,
                                        std::span<const double> eps_grid, double A_fit) {
    auto A1 = [&](cplx zz, long long n) { return transfer(f1, d, x, zz, n); };
    auto A2 = [&](cplx zz, long long n) { return transfer(f2, d, x, zz, n); };
    return comparability_core(A1, A2, E_grid, eps_grid, A_fit);
}

ComparabilityReport comparability_check_sampled(const std::function<double(long long)>& v1,
                                                const std::function<double(long long)>& v2,
                                                std::span<const double> E_grid,
                                                std::span<const double> eps_grid, double A_fit) {
    auto make = [](const std::function<double(long long)>& v) {
        return [&v](cplx zz, long long n) -> LogScaledMatrix {
            if (n > 0) {
                LogScaledMatrix acc = LogScaledMatrix::identity();
                for (long long t = 1; t <= n; ++t) acc.premultiply_sl2(Mat2c::one_step(v(t), zz));
                return acc;
            }
            LogScaledMatrix acc = LogScaledMatrix::identity();
            for (long long t = 0; t > n; --t) acc.postmultiply_sl2(Mat2c::one_step(v(t), zz));
            return acc.inverse_unimodular();
        };
    };
    return comparability_core(make(v1), make(v2), E_grid, eps_grid, A_fit);
}

}  // namespace qdlab
