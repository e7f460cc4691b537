#include "qdlab/torus.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qdlab {

TorusPoint::TorusPoint(std::vector<double> c) : coords(std::move(c)) {
    for (double& v : coords) v = reduce_mod1(v);
}

TorusPoint TorusPoint::zero(int dim) {
    if (dim < 1) throw std::invalid_argument("TorusPoint: dim must be >= 1");
    TorusPoint p;
    p.coords.assign(static_cast<std::size_t>(dim), 0.0);
    return p;
}

bool TorusPoint::in_fundamental_domain() const {
    for (double v : coords)
        if (!(v >= -0.5 && v < 0.5)) return false;
    return true;
}

double torus_dist_max(const TorusPoint& a, const TorusPoint& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("torus_dist: dimension mismatch");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, circle_dist(a.coords[i], b.coords[i]));
    return m;
}

double torus_dist_euclid(const TorusPoint& a, const TorusPoint& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("torus_dist: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        double d = circle_dist(a.coords[i], b.coords[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

Frequency::Frequency(std::vector<double> w, DiophClass cls, double A_, double c_)
    : omega(std::move(w)), dioph(cls), A(A_), c(c_) {
    if (omega.empty()) throw std::invalid_argument("Frequency: empty omega");
    if (dioph == DiophClass::DC && !(A > 0.0 && c > 0.0))
        throw std::invalid_argument("Frequency: DC requires A > 0 and c > 0");
    if (dioph == DiophClass::SDC && A > 2.0)
        throw std::invalid_argument("Frequency: SDC only used with A <= 2");
}

Dynamics::Dynamics(MapKind k, Frequency f) : kind(k), freq(std::move(f)) {
    if (kind == MapKind::SkewShift && freq.dim() < 2)
        throw std::invalid_argument("Dynamics: skew-shift requires dim >= 2");
}

TorusPoint step(const Dynamics& d, const TorusPoint& x) {
    if (x.dim() != d.dim()) throw std::invalid_argument("step: dimension mismatch");
    TorusPoint y = x;
    if (d.kind == MapKind::Shift) {
        for (int i = 0; i < x.dim(); ++i)
            y.coords[i] = reduce_mod1(x.coords[i] + d.freq.omega[i]);
    } else {
        // (x1, ..., xv) -> (x1 + w, x2 + x1, ..., xv + x_{v-1})
        y.coords[0] = reduce_mod1(x.coords[0] + d.freq.omega[0]);
        for (int i = 1; i < x.dim(); ++i)
            y.coords[i] = reduce_mod1(x.coords[i] + x.coords[i - 1]);
    }
    return y;
}

TorusPoint step_inverse(const Dynamics& d, const TorusPoint& x) {
    if (x.dim() != d.dim()) throw std::invalid_argument("step_inverse: dimension mismatch");
    TorusPoint y = x;
    if (d.kind == MapKind::Shift) {
        for (int i = 0; i < x.dim(); ++i)
            y.coords[i] = reduce_mod1(x.coords[i] - d.freq.omega[i]);
    } else {
        y.coords[0] = reduce_mod1(x.coords[0] - d.freq.omega[0]);
        for (int i = 1; i < x.dim(); ++i)
            y.coords[i] = reduce_mod1(x.coords[i] - y.coords[i - 1]);
    }
    return y;
}

TorusPoint iterate(const Dynamics& d, TorusPoint x, long long n) {
    if (n >= 0) {
        for (long long k = 0; k < n; ++k) x = step(d, x);
    } else {
        for (long long k = 0; k > n; --k) x = step_inverse(d, x);
    }
    return x;
}

std::vector<TorusPoint> orbit(const Dynamics& d, const TorusPoint& x0, long long N) {
    if (N < 1) throw std::invalid_argument("orbit: N must be >= 1");
    std::vector<TorusPoint> out;
    out.reserve(static_cast<std::size_t>(N));
    TorusPoint x = x0;
    for (long long k = 0; k < N; ++k) {
        x = step(d, x);
        out.push_back(x);
    }
    return out;
}

ContinuedFraction continued_fraction(double omega, int n_max) {
    if (!(omega > 0.0 && omega < 1.0))
        throw std::invalid_argument("continued_fraction: omega must lie in (0,1)");
    if (n_max < 1) throw std::invalid_argument("continued_fraction: n_max must be >= 1");

    ContinuedFraction cf;
    cf.omega = omega;
    // (p_0, q_0) = (0, 1); recurrences seeded with (p_{-1}, q_{-1}) = (1, 0).
    long long p_prev = 1, q_prev = 0;
    long long p_cur = 0, q_cur = 1;
    cf.convergents.emplace_back(p_cur, q_cur);

    long double x = static_cast<long double>(omega);
    const long double noise = 64.0L * LDBL_EPSILON;
    for (int i = 1; i <= n_max; ++i) {
        if (x < noise) {
            cf.exhausted = true;
            break;
        }
        long double inv = 1.0L / x;
        long double a_ld = std::floor(inv);
        if (a_ld > 9.0e17L) {  // quotient no longer trustworthy / representable
            cf.exhausted = true;
            break;
        }
        long long a = static_cast<long long>(a_ld);
        // q_{n} = a_n q_{n-1} + q_{n-2}, exactly in integers; stop before overflow
        if (q_cur > (std::numeric_limits<long long>::max() - q_prev) / std::max<long long>(a, 1)) {
            cf.exhausted = true;
            break;
        }
        long long p_next = a * p_cur + p_prev;
        long long q_next = a * q_cur + q_prev;
        cf.partial_quotients.push_back(a);
        cf.convergents.emplace_back(p_next, q_next);
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = p_next;
        q_cur = q_next;
        x = inv - a_ld;
        if (x <= 0.0L) {  // rational to working precision
            cf.exhausted = true;
            break;
        }
    }
    return cf;
}

DiophantineMargin diophantine_margin(const Frequency& f, long long K_max, double A) {
    if (K_max < 1) throw std::invalid_argument("diophantine_margin: K_max must be >= 1");
    const int nu = f.dim();
    const long double side = 2.0L * static_cast<long double>(K_max) + 1.0L;
    long double total = 1.0L;
    for (int i = 0; i < nu; ++i) total *= side;
    if (total > 2.0e8L)
        throw std::runtime_error("diophantine_margin: lattice enumeration too large (limit 2e8 points)");

    DiophantineMargin out;
    out.margin = std::numeric_limits<double>::infinity();
    std::vector<long long> k(static_cast<std::size_t>(nu), -K_max);
    bool done = false;
    while (!done) {
        long long kmax_abs = 0;
        for (long long ki : k) kmax_abs = std::max(kmax_abs, std::llabs(ki));
        if (kmax_abs != 0) {
            long double s = 0.0L;
            for (int i = 0; i < nu; ++i)
                s += static_cast<long double>(k[static_cast<std::size_t>(i)]) *
                     static_cast<long double>(f.omega[static_cast<std::size_t>(i)]);
            long double fr = s - std::floor(s + 0.5L);
            long double dist = fr < 0 ? -fr : fr;
            double val = static_cast<double>(
                dist * std::pow(static_cast<long double>(kmax_abs), static_cast<long double>(A)));
            ++out.lattice_points;
            if (val < out.margin) {
                out.margin = val;
                out.argmin = k;
            }
        }
        // odometer over the box |k|_inf <= K_max
        int i = 0;
        for (; i < nu; ++i) {
            if (k[static_cast<std::size_t>(i)] < K_max) {
                ++k[static_cast<std::size_t>(i)];
                break;
            }
            k[static_cast<std::size_t>(i)] = -K_max;
        }
        done = (i == nu);
    }
    return out;
}

}  // namespace qdlab
