#include "qdlab/equidistribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qdlab/parallel.hpp"

namespace qdlab {

TargetSet TargetSet::ball(TorusPoint center, double radius, BallMetric metric) {
    if (radius < 0.0) throw std::invalid_argument("TargetSet: negative radius");
    TargetSet s;
    s.kind_ = Kind::Ball;
    s.center_ = std::move(center);
    s.radius_ = std::min(radius, 0.5);  // radius 1/2 in max norm covers the torus
    s.metric_ = metric;
    return s;
}

TargetSet TargetSet::sublevel(Polynomial p, double threshold, Sense sense) {
    if (p.total_degree() < 1) throw std::invalid_argument("TargetSet: sublevel degree must be >= 1");
    TargetSet s;
    s.kind_ = Kind::Sublevel;
    s.poly_ = std::move(p);
    s.threshold_ = threshold;
    s.sense_ = sense;
    return s;
}

TargetSet TargetSet::union_of(std::vector<TargetSet> parts) {
    if (parts.empty()) throw std::invalid_argument("TargetSet: empty union");
    TargetSet s;
    s.kind_ = Kind::Union;
    s.parts_ = std::move(parts);
    return s;
}

bool TargetSet::contains(const TorusPoint& x) const {
    switch (kind_) {
        case Kind::Ball: {
            double dist = metric_ == BallMetric::MaxNorm ? torus_dist_max(x, center_)
                                                         : torus_dist_euclid(x, center_);
            return dist <= radius_;
        }
        case Kind::Sublevel: {
            double v = poly_.eval(x.coords);
            if (sense_ == Sense::LE) return v <= threshold_;
            if (sense_ == Sense::GE) return v >= threshold_;
            return v == threshold_;
        }
        case Kind::Union:
            for (const auto& p : parts_)
                if (p.contains(x)) return true;
            return false;
    }
    return false;
}

int TargetSet::degree() const {
    switch (kind_) {
        case Kind::Ball:
            return 2;
        case Kind::Sublevel:
            return poly_.total_degree();
        case Kind::Union: {
            int d = 0;
            for (const auto& p : parts_) d += p.degree();
            return d;
        }
    }
    return 0;
}

HitReport hit_count(const Dynamics& d, const TorusPoint& x0, const TargetSet& S, long long N) {
    if (N < 1) throw std::invalid_argument("hit_count: N must be >= 1");
    HitReport rep;
    rep.N = N;

    const long long block = 1 << 20;
    std::vector<TorusPoint> pts;
    std::vector<char> flags;
    TorusPoint x = x0;
    const bool parallel = par::enabled();
    for (long long base = 0; base < N; base += block) {
        long long len = std::min(block, N - base);
        pts.clear();
        pts.reserve(static_cast<std::size_t>(len));
        for (long long i = 0; i < len; ++i) {
            x = step(d, x);
            pts.push_back(x);
        }
        flags.assign(static_cast<std::size_t>(len), 0);
#pragma omp parallel for schedule(static) if (parallel)
        for (long long i = 0; i < len; ++i)
            flags[static_cast<std::size_t>(i)] = S.contains(pts[static_cast<std::size_t>(i)]) ? 1 : 0;
        for (long long i = 0; i < len; ++i) {
            if (flags[static_cast<std::size_t>(i)]) {
                ++rep.hits;
                rep.hit_indices.push_back(base + i + 1);
            }
        }
    }
    if (!rep.hit_indices.empty()) rep.first_hit = rep.hit_indices.front();
    return rep;
}

double fejer_kernel(long long R, double x) {
    if (R < 1) throw std::invalid_argument("fejer_kernel: R must be >= 1");
    if (std::abs(x) > std::numbers::pi + 1e-9)
        throw std::invalid_argument("fejer_kernel: x must lie in [-pi, pi]");
    double s = std::sin(0.5 * x);
    if (s == 0.0) return double(R);
    double r = std::sin(0.5 * double(R) * x) / s;
    return r * r / double(R);
}

FejerHitBound fejer_hit_bound(const Dynamics& d, const TorusPoint& x0, double eps, long long N,
                              double A) {
    if (d.kind != MapKind::Shift)
        throw std::invalid_argument("fejer_hit_bound: defined for the shift");
    if (!(eps > 0.0)) throw std::invalid_argument("fejer_hit_bound: eps must be > 0");
    if (N < 1) throw std::invalid_argument("fejer_hit_bound: N must be >= 1");

    FejerHitBound out;
    if (d.freq.dioph != DiophClass::DC)
        out.warnings.push_back("frequency is not DC-classified; the bound has no guarantee");
    out.eps_used = std::min(eps, 0.5);

    TargetSet ball = TargetSet::ball(TorusPoint::zero(d.dim()), out.eps_used, BallMetric::MaxNorm);
    out.lhs = hit_count(d, x0, ball, N).hits;
    out.rhs = out.C * double(N) *
              (std::pow(out.eps_used, double(d.dim())) + std::pow(out.eps_used, -A) / double(N));
    out.bound_holds = double(out.lhs) <= out.rhs;
    if (!out.bound_holds)
        out.warnings.push_back("hit count exceeds the calibrated bound");
    return out;
}

bool Interval::contains(double x) const {
    double rel = x - lo;
    rel -= std::floor(rel);  // into [0, 1)
    return rel < len;
}

Lemma9Report lemma9_check(const ContinuedFraction& cf, int n_idx, const Interval& delta,
                          long long grid_size) {
    if (n_idx < 1 || n_idx >= static_cast<int>(cf.convergents.size()))
        throw std::invalid_argument("lemma9_check: convergent index out of range");
    if (grid_size < 1) throw std::invalid_argument("lemma9_check: grid_size must be >= 1");
    long long qn = cf.convergents[static_cast<std::size_t>(n_idx)].second;
    long long qn1 = cf.convergents[static_cast<std::size_t>(n_idx - 1)].second;
    if (!(delta.len > 1.0 / double(qn)))
        throw std::invalid_argument("lemma9_check: interval must be longer than 1/q_n");

    Lemma9Report rep;
    rep.bound = qn + qn1 - 1;

    const double omega = cf.omega;
    long long worst = 0;
    long long misses = 0;
    const bool parallel = par::enabled();
#pragma omp parallel for schedule(static) reduction(max : worst) reduction(+ : misses) if (parallel)
    for (long long g = 0; g < grid_size; ++g) {
        double x = double(g) / double(grid_size);
        long long first = rep.bound + 1;
        double y = x;
        for (long long j = 1; j <= rep.bound; ++j) {
            y += omega;
            y -= std::floor(y);
            if (delta.contains(y)) {
                first = j;
                break;
            }
        }
        if (first > rep.bound) ++misses;
        worst = std::max(worst, first);
    }
    rep.max_first_hit = worst;
    rep.misses = misses;
    rep.pass = (misses == 0);
    return rep;
}

DeltaFit delta_fit(const Dynamics& d, const TorusPoint& x0, const TorusPoint& center,
                   double delta_try, std::span<const long long> N_grid, BallMetric metric) {
    if (N_grid.size() < 2) throw std::invalid_argument("delta_fit: need at least two N values");
    long long lo = *std::min_element(N_grid.begin(), N_grid.end());
    long long hi = *std::max_element(N_grid.begin(), N_grid.end());
    if (double(hi) / double(lo) < 100.0)
        throw std::invalid_argument("delta_fit: N grid must span at least two decades");

    DeltaFit fit;
    bool any_hits = false;
    for (long long N : N_grid) {
        double eps = std::pow(double(N), -delta_try);
        TargetSet S = TargetSet::ball(center, eps, metric);
        long long h = hit_count(d, x0, S, N).hits;
        fit.counts.emplace_back(N, h);
        if (h > 0) any_hits = true;
    }
    if (!any_hits) throw std::runtime_error("delta_fit: degenerate fit, all hit counts are zero");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long long m = 0;
    for (auto [N, h] : fit.counts) {
        if (h == 0) continue;  // log undefined; drop the sample
        double u = std::log(double(N));
        double y = std::log(double(h) / double(N));
        sx += u;
        sy += y;
        sxx += u * u;
        sxy += u * y;
        ++m;
    }
    if (m < 2) throw std::runtime_error("delta_fit: too few nonzero counts to fit");
    double denom = double(m) * sxx - sx * sx;
    double slope = (double(m) * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / double(m);
    double ss = 0.0;
    for (auto [N, h] : fit.counts) {
        if (h == 0) continue;
        double u = std::log(double(N));
        double y = std::log(double(h) / double(N));
        double r = y - (intercept + slope * u);
        ss += r * r;
    }
    fit.delta_hat = -slope;
    fit.residual = std::sqrt(ss / double(m));
    return fit;
}

}  // namespace qdlab
