#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qdlab {

// Reduce to the fundamental domain [-1/2, 1/2).
inline double reduce_mod1(double x) {
    double r = x - std::floor(x + 0.5);
    if (r >= 0.5) r -= 1.0;  // guards the x + 0.5 rounding edge
    return r;
}

struct TorusPoint {
    std::vector<double> coords;  // each in [-1/2, 1/2)

    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> c);
    static TorusPoint zero(int dim);

    int dim() const { return static_cast<int>(coords.size()); }
    bool in_fundamental_domain() const;
};

// Torus distance of a single coordinate difference.
inline double circle_dist(double a, double b) {
    double d = reduce_mod1(a - b);
    return d < 0 ? -d : d;
}

// max-norm and euclidean distances to the nearest lattice translate
double torus_dist_max(const TorusPoint& a, const TorusPoint& b);
double torus_dist_euclid(const TorusPoint& a, const TorusPoint& b);

enum class DiophClass { DC, SDC, Unclassified };

struct Frequency {
    std::vector<double> omega;
    DiophClass dioph = DiophClass::Unclassified;
    double A = 0.0;
    double c = 0.0;

    Frequency() = default;
    Frequency(std::vector<double> w, DiophClass cls = DiophClass::Unclassified,
              double A_ = 0.0, double c_ = 0.0);
    int dim() const { return static_cast<int>(omega.size()); }
};

enum class MapKind { Shift, SkewShift };

struct Dynamics {
    MapKind kind = MapKind::Shift;
    Frequency freq;

    Dynamics() = default;
    Dynamics(MapKind k, Frequency f);
    int dim() const { return freq.dim(); }
};

TorusPoint step(const Dynamics& d, const TorusPoint& x);
TorusPoint step_inverse(const Dynamics& d, const TorusPoint& x);

// T^n x for signed n, by repeated (inverse) stepping.
TorusPoint iterate(const Dynamics& d, TorusPoint x, long long n);

// (T x0, T^2 x0, ..., T^N x0)
std::vector<TorusPoint> orbit(const Dynamics& d, const TorusPoint& x0, long long N);

struct ContinuedFraction {
    double omega = 0.0;
    std::vector<long long> partial_quotients;              // a_1, a_2, ...
    std::vector<std::pair<long long, long long>> convergents;  // (p_n, q_n), starting at (p_0, q_0) = (a_0, 1)
    bool exhausted = false;  // remainder fell below working precision (or q overflow)
};

// Continued fraction of omega in (0,1), computed in long double.
ContinuedFraction continued_fraction(double omega, int n_max);

struct DiophantineMargin {
    double margin = 0.0;            // min over 0 < |k|_inf <= K_max of ||k.omega|| * |k|_inf^A
    std::vector<long long> argmin;  // a minimizing k
    long long lattice_points = 0;
};

// Exhaustive lattice scan; a finite certificate, not a proof of membership.
DiophantineMargin diophantine_margin(const Frequency& f, long long K_max, double A);
inline DiophantineMargin diophantine_margin(const Frequency& f, long long K_max) {
    return diophantine_margin(f, K_max, f.A);
}

}  // namespace qdlab
