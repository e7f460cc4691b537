#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qdlab/polynomial.hpp"
#include "qdlab/torus.hpp"

namespace qdlab {

enum class PotentialKind { TrigPoly, GevreyModel };

struct FourierMode {
    std::vector<int> n;
    std::complex<double> fhat;
};

// Real-valued sampling function f on T^nu given by finitely many Fourier
// modes, together with the coupling lambda. Gevrey models additionally
// certify the coefficient decay |fhat(n)| <= exp(-|n|^{1/sigma}).
class Potential {
public:
    static Potential trig_poly(int dim, const std::vector<FourierMode>& modes, double lambda);
    static Potential gevrey(int dim, double sigma, int cutoff,
                            const std::vector<FourierMode>& modes, double lambda);
    // All coefficients up to the cutoff saturating the decay bound.
    static Potential gevrey_saturated(int dim, double sigma, int cutoff, double lambda);
    // coupling * cos(2 pi x) on T^1
    static Potential cosine(double coupling);
    static Potential zero(int dim);

    double eval(const TorusPoint& x) const;  // lambda * f(x)

    PotentialKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double coupling() const { return lambda_; }
    double sigma() const { return sigma_; }
    int cutoff() const { return cutoff_; }

    // max of |lambda f| over a 1e4-point grid
    double sup_norm_bound() const { return sup_norm_bound_; }
    // lambda * sum |fhat|; a rigorous upper bound for the sup norm
    double coeff_l1() const { return coeff_l1_; }
    int max_mode_degree() const;  // max |n|_inf over stored modes

    double zero_coeff() const { return c0_; }
    struct HalfMode {
        std::vector<int> n;  // canonical representative of the {n, -n} pair
        std::complex<double> coeff;
    };
    const std::vector<HalfMode>& half_modes() const { return half_; }

    std::string serialize() const;
    static Potential deserialize(const std::string& text);

private:
    Potential() = default;
    void finalize();  // sup-norm grid scan and l1 bound

    PotentialKind kind_ = PotentialKind::TrigPoly;
    int dim_ = 1;
    double lambda_ = 1.0;
    double sigma_ = 0.0;
    int cutoff_ = 0;
    double c0_ = 0.0;
    std::vector<HalfMode> half_;
    double sup_norm_bound_ = 0.0;
    double coeff_l1_ = 0.0;
};

// Polynomial-type approximant with a rigorous sup-norm error certificate.
// Kept in factored per-mode form (coefficient times per-axis factors), which
// is the numerically stable way to evaluate it; the expanded coefficient map
// is available through to_polynomial().
struct CertifiedApprox {
    enum class Source { FourierTruncation, Polynomialization };

    struct ApproxMode {
        std::vector<int> n;
        std::complex<double> coeff;
        // per-axis Taylor degrees of exp(i theta); empty means the factor is
        // kept as an exact exponential (truncation stage)
        std::vector<int> taylor_degree;
    };

    Source source = Source::FourierTruncation;
    int dim = 1;
    double lambda = 1.0;
    int N0 = 0;        // Fourier cutoff
    int N1 = 0;        // total polynomial degree (0 for truncation stage)
    double sup_error = 0.0;  // rigorous bound on sup |lambda f - eval|
    double zero_coeff = 0.0;
    std::vector<ApproxMode> half_modes;

    double eval(const TorusPoint& x) const;
    Polynomial to_polynomial(std::size_t max_terms = 2000000) const;
    int total_degree() const;
};

// Keep modes with |n|_inf <= N0; the certificate covers both the dropped
// stored modes and, for Gevrey models, the class tail beyond the cutoff.
CertifiedApprox truncate_fourier(const Potential& f, int N0);

// Replace each exponential factor by its Taylor polynomial about 0, with
// per-axis degree chosen minimally against the remainder bound
// (pi |n_j|)^{m+1} / (m+1)!  <=  tol / (#modes * max|coeff|).
CertifiedApprox polynomialize(const CertifiedApprox& t, double tol, int degree_cap = 512);

}  // namespace qdlab
