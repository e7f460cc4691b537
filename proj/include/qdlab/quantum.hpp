#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qdlab/potential.hpp"
#include "qdlab/spectral.hpp"
#include "qdlab/torus.hpp"

namespace qdlab {

// Window policy failure: the ballistic regime needs a larger window than the
// configured cap allows.
struct WindowCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite window of the whole-line operator: sites -L..L, unit off-diagonal,
// diagonal v_n = lambda f(T^n x).
struct TruncatedOperator {
    long long L = 0;
    std::vector<double> diagonal;  // index n + L <-> site n
    TorusPoint center;
    Dynamics dyn;

    long long size() const { return 2 * L + 1; }
    double diag_sup() const;
};

TruncatedOperator build(const Potential& f, const Dynamics& d, const TorusPoint& x, long long L);

// K = max(4, ceil(||v||_inf) + 3), so the spectrum lies in [-K + 1, K - 1].
double spectrum_bound_K(const TruncatedOperator& op);

struct AmplitudeProfile {
    double T = 0.0;
    long long L = 0;
    std::vector<double> a;  // index n + L <-> site n
    double mass = 0.0;            // sum of a before any clipping
    double truncation_leak = 0.0; // mass within the outer buffer of the window
    double clipped_mass = 0.0;
    double leak_tol = 0.0;
    bool valid = false;

    double at(long long n) const { return a[static_cast<std::size_t>(n + L)]; }
};

struct AmplitudeOptions {
    double leak_tol = 1e-6;
    double buffer_frac = 0.1;  // outer fraction of the window counted as leak
};

// Time-averaged site occupation from the spectral decomposition:
//   a(n,T) = (1/2) sum_{s=0,1} sum_{j,k} c_j c_k  th^2 / (th^2 + (E_j - E_k)^2),
// with c_j = phi_j(s) phi_j(n) and th = 2/T. This is the exact average of
// |<e^{itH} delta_s, delta_n>|^2 against the weight (2/T) e^{-2t/T} dt.
AmplitudeProfile amplitudes(const TruncatedOperator& op, double T,
                            const AmplitudeOptions& opts = {});

// sum_n (1 + |n|)^p a(n,T) over the window
double moments(const AmplitudeProfile& prof, double p);

struct OutsideProbability {
    double P = 0.0, P_l = 0.0, P_r = 0.0;
};

OutsideProbability outside_probability(const AmplitudeProfile& prof, long long N);

struct AdaptiveOptions {
    long long L0 = 64;
    long long L_cap = 1 << 14;
    AmplitudeOptions amp;
};

// Doubles the window until the leak tolerance is met; throws
// WindowCapExceeded past the cap (free or ballistic regimes).
AmplitudeProfile adaptive_profile(const Potential& f, const Dynamics& d, const TorusPoint& x,
                                  double T, double leak_tol, const AdaptiveOptions& opts = {});

// CSV body: n, a(n,T), cumulative mass over |m| <= |n|
std::string profile_csv(const AmplitudeProfile& prof);

}  // namespace qdlab
