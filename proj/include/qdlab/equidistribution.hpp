#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdlab/polynomial.hpp"
#include "qdlab/torus.hpp"

namespace qdlab {

enum class BallMetric { MaxNorm, Euclid };
enum class Sense { LE, GE, EQ };

// Orbit-counting target: a torus ball, a polynomial sublevel set, or a
// finite union. Membership is exact given exact coordinates; ties on a
// sublevel threshold count as hits.
class TargetSet {
public:
    static TargetSet ball(TorusPoint center, double radius, BallMetric metric = BallMetric::MaxNorm);
    static TargetSet sublevel(Polynomial p, double threshold, Sense sense);
    static TargetSet union_of(std::vector<TargetSet> parts);

    bool contains(const TorusPoint& x) const;
    int degree() const;  // 2 for a ball, total degree for a sublevel, sum over a union

    bool is_ball() const { return kind_ == Kind::Ball; }
    double radius() const { return radius_; }

private:
    TargetSet() = default;
    enum class Kind { Ball, Sublevel, Union };
    Kind kind_ = Kind::Ball;
    // ball
    TorusPoint center_;
    double radius_ = 0.0;
    BallMetric metric_ = BallMetric::MaxNorm;
    // sublevel
    Polynomial poly_;
    double threshold_ = 0.0;
    Sense sense_ = Sense::LE;
    // union
    std::vector<TargetSet> parts_;
};

struct HitReport {
    long long N = 0;
    long long hits = 0;
    std::vector<long long> hit_indices;  // 1-based orbit indices
    std::optional<long long> first_hit;
};

// Exact count of k in 1..N with T^k x0 in S. The orbit is generated
// sequentially (the counts are defined through iterated stepping); membership
// tests run in parallel over fixed blocks.
HitReport hit_count(const Dynamics& d, const TorusPoint& x0, const TargetSet& S, long long N);

// F_R(x) = (1/R) (sin(Rx/2) / sin(x/2))^2 for x in [-pi, pi]; F_R(0) = R.
double fejer_kernel(long long R, double x);

struct FejerHitBound {
    long long lhs = 0;        // hits in the max-norm ball of radius eps about 0
    double rhs = 0.0;         // C * N * (eps^nu + eps^{-A} / N), C = 16
    double eps_used = 0.0;    // after the clamp to (0, 1/2]
    double C = 16.0;
    bool bound_holds = false;
    std::vector<std::string> warnings;
};

FejerHitBound fejer_hit_bound(const Dynamics& d, const TorusPoint& x0, double eps, long long N,
                              double A);

struct Interval {
    double lo = 0.0;   // reduced to [-1/2, 1/2)
    double len = 0.0;  // in (0, 1]
    bool contains(double x) const;
};

struct Lemma9Report {
    long long max_first_hit = 0;  // over the phase grid; bound + 1 marks a miss
    long long bound = 0;          // q_n + q_{n-1} - 1
    bool pass = false;
    long long misses = 0;
};

// First-hit check of a circle rotation into an interval longer than 1/q_n,
// exhaustively over a uniform phase grid.
Lemma9Report lemma9_check(const ContinuedFraction& cf, int n_idx, const Interval& delta,
                          long long grid_size);

struct DeltaFit {
    double delta_hat = 0.0;
    double residual = 0.0;
    std::vector<std::pair<long long, long long>> counts;  // (N, hits)
};

// Hit fractions of shrinking balls eps = N^{-delta_try}; least-squares slope
// of ln(hits/N) against ln N, returned with flipped sign.
DeltaFit delta_fit(const Dynamics& d, const TorusPoint& x0, const TorusPoint& center,
                   double delta_try, std::span<const long long> N_grid,
                   BallMetric metric = BallMetric::MaxNorm);

}  // namespace qdlab
