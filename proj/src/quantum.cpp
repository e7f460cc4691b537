#include "qdlab/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qdlab/parallel.hpp"

namespace qdlab {

double TruncatedOperator::diag_sup() const {
    double m = 0.0;
    for (double v : diagonal) m = std::max(m, std::abs(v));
    return m;
}

TruncatedOperator build(const Potential& f, const Dynamics& d, const TorusPoint& x, long long L) {
    if (L < 4) throw std::invalid_argument("build: window half-width must be >= 4");
    TruncatedOperator op;
    op.L = L;
    op.center = x;
    op.dyn = d;
    op.diagonal.assign(static_cast<std::size_t>(2 * L + 1), 0.0);

    op.diagonal[static_cast<std::size_t>(L)] = f.eval(x);
    TorusPoint y = x;
    for (long long n = 1; n <= L; ++n) {
        y = step(d, y);
        op.diagonal[static_cast<std::size_t>(L + n)] = f.eval(y);
    }
    y = x;
    for (long long n = 1; n <= L; ++n) {
        y = step_inverse(d, y);
        op.diagonal[static_cast<std::size_t>(L - n)] = f.eval(y);
    }
    return op;
}

double spectrum_bound_K(const TruncatedOperator& op) {
    return std::max(4.0, std::ceil(op.diag_sup()) + 3.0);
}

AmplitudeProfile amplitudes(const TruncatedOperator& op, double T, const AmplitudeOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("amplitudes: T must be > 0");
    const long long m = op.size();
    SpectralData sd = diagonalize_tridiagonal(op.diagonal, 1.0);

    // Lorentzian pair weights
    const double theta = 2.0 / T;
    std::vector<double> W(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    {
        const bool parallel = par::enabled();
#pragma omp parallel for schedule(static) if (parallel)
        for (long long j = 0; j < m; ++j) {
            double ej = sd.eigenvalues[static_cast<std::size_t>(j)];
            double* row = &W[static_cast<std::size_t>(j * m)];
            for (long long k = 0; k < m; ++k) {
                double de = ej - sd.eigenvalues[static_cast<std::size_t>(k)];
                row[k] = theta * theta / (theta * theta + de * de);
            }
        }
    }

    // initial sites 0 and 1
    const long long s0 = op.L, s1 = op.L + 1;
    std::vector<double> u0(static_cast<std::size_t>(m)), u1(static_cast<std::size_t>(m));
    for (long long j = 0; j < m; ++j) {
        u0[static_cast<std::size_t>(j)] = sd.vec(s0, j);
        u1[static_cast<std::size_t>(j)] = sd.vec(s1, j);
    }

    AmplitudeProfile prof;
    prof.T = T;
    prof.L = op.L;
    prof.leak_tol = opts.leak_tol;
    prof.a.assign(static_cast<std::size_t>(m), 0.0);

    const bool parallel = par::enabled();
#pragma omp parallel for schedule(static) if (parallel)
    for (long long site = 0; site < m; ++site) {
        // d_j = phi_j(s) phi_j(site); a = d^T W d, using the symmetry of W
        double acc = 0.0;
        for (int s = 0; s < 2; ++s) {
            const std::vector<double>& u = (s == 0) ? u0 : u1;
            double quad = 0.0;
            for (long long j = 0; j < m; ++j) {
                double dj = u[static_cast<std::size_t>(j)] * sd.vec(site, j);
                if (dj == 0.0) continue;
                const double* row = &W[static_cast<std::size_t>(j * m)];
                double inner = 0.0;
                for (long long k = j + 1; k < m; ++k)
                    inner += u[static_cast<std::size_t>(k)] * sd.vec(site, k) * row[k];
                quad += dj * (dj + 2.0 * inner);
            }
            acc += 0.5 * quad;
        }
        prof.a[static_cast<std::size_t>(site)] = acc;
    }

    double mass = 0.0;
    for (double v : prof.a) mass += v;
    prof.mass = mass;

    for (double& v : prof.a) {
        if (v < 0.0) {
            if (v < -1e-12) throw std::runtime_error("amplitudes: negative occupation beyond tolerance");
            prof.clipped_mass += -v;
            v = 0.0;
        }
    }

    long long buffer_start = static_cast<long long>(std::floor((1.0 - opts.buffer_frac) * double(op.L)));
    double leak = 0.0;
    for (long long n = -op.L; n <= op.L; ++n)
        if (std::llabs(n) > buffer_start) leak += prof.at(n);
    prof.truncation_leak = leak;

    prof.valid = (leak <= opts.leak_tol) && (std::abs(mass - 1.0) <= 1e-8);
    return prof;
}

double moments(const AmplitudeProfile& prof, double p) {
    if (p < 0.0) throw std::invalid_argument("moments: p must be >= 0");
    if (!prof.valid) throw std::invalid_argument("moments: profile failed validity checks");
    double s = 0.0;
    for (long long n = -prof.L; n <= prof.L; ++n)
        s += std::pow(1.0 + double(std::llabs(n)), p) * prof.at(n);
    return s;
}

OutsideProbability outside_probability(const AmplitudeProfile& prof, long long N) {
    if (N < 0 || N > prof.L) throw std::invalid_argument("outside_probability: need 0 <= N <= L");
    OutsideProbability out;
    for (long long n = -prof.L; n < -N; ++n) out.P_l += prof.at(n);
    for (long long n = N + 1; n <= prof.L; ++n) out.P_r += prof.at(n);
    out.P = out.P_l + out.P_r;
    return out;
}

AmplitudeProfile adaptive_profile(const Potential& f, const Dynamics& d, const TorusPoint& x,
                                  double T, double leak_tol, const AdaptiveOptions& opts) {
    if (!(leak_tol > 0.0 && leak_tol < 1.0))
        throw std::invalid_argument("adaptive_profile: leak_tol must lie in (0,1)");
    AmplitudeOptions amp = opts.amp;
    amp.leak_tol = leak_tol;
    for (long long L = opts.L0; L <= opts.L_cap; L *= 2) {
        TruncatedOperator op = build(f, d, x, L);
        AmplitudeProfile prof = amplitudes(op, T, amp);
        if (prof.valid) return prof;
    }
    throw WindowCapExceeded(
        "adaptive_profile: window cap exceeded; the state is still spreading "
        "(free/ballistic regime), raise the cap or reduce T");
}

std::string profile_csv(const AmplitudeProfile& prof) {
    std::vector<double> cum(static_cast<std::size_t>(prof.L + 1));
    cum[0] = prof.at(0);
    for (long long r = 1; r <= prof.L; ++r)
        cum[static_cast<std::size_t>(r)] = cum[static_cast<std::size_t>(r - 1)] + prof.at(r) + prof.at(-r);

    std::ostringstream os;
    os << "n,a,cumulative_from_center\n";
    char buf[64];
    for (long long n = -prof.L; n <= prof.L; ++n) {
        os << n << ",";
        std::snprintf(buf, sizeof buf, "%.17g", prof.at(n));
        os << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", cum[static_cast<std::size_t>(std::llabs(n))]);
        os << buf << "\n";
    }
    return os.str();
}

}  // namespace qdlab
