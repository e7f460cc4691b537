#include "qdlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qdlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_zero_vec(const std::vector<int>& n) {
    for (int v : n)
        if (v != 0) return false;
    return true;
}

// canonical representative: first nonzero coordinate positive
bool is_canonical(const std::vector<int>& n) {
    for (int v : n) {
        if (v > 0) return true;
        if (v < 0) return false;
    }
    return false;  // zero vector handled separately
}

std::vector<int> negate(const std::vector<int>& n) {
    std::vector<int> m(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) m[i] = -n[i];
    return m;
}

double euclid_norm(const std::vector<int>& n) {
    double s = 0.0;
    for (int v : n) s += double(v) * double(v);
    return std::sqrt(s);
}

int inf_norm(const std::vector<int>& n) {
    int m = 0;
    for (int v : n) m = std::max(m, std::abs(v));
    return m;
}

// #{n in Z^nu : |n|_inf = m}
double shell_count(int nu, long long m) {
    if (m == 0) return 1.0;
    double outer = std::pow(2.0 * double(m) + 1.0, nu);
    double inner = std::pow(2.0 * double(m) - 1.0, nu);
    return outer - inner;
}

double fmt_digit_round_trip(const char* s) {
    return std::strtod(s, nullptr);
}

}  // namespace

void Potential::finalize() {
    std::sort(half_.begin(), half_.end(),
              [](const HalfMode& a, const HalfMode& b) { return a.n < b.n; });
    coeff_l1_ = std::abs(c0_);
    for (const auto& hm : half_) coeff_l1_ += 2.0 * std::abs(hm.coeff);
    coeff_l1_ *= std::abs(lambda_);

    // sup-norm scan over ~1e4 grid points
    int per_axis = std::max(2, static_cast<int>(std::ceil(std::pow(1.0e4, 1.0 / dim_))));
    std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
    TorusPoint x = TorusPoint::zero(dim_);
    double best = 0.0;
    bool done = false;
    while (!done) {
        for (int i = 0; i < dim_; ++i)
            x.coords[static_cast<std::size_t>(i)] =
                reduce_mod1(double(idx[static_cast<std::size_t>(i)]) / per_axis - 0.5);
        best = std::max(best, std::abs(eval(x)));
        int i = 0;
        for (; i < dim_; ++i) {
            if (++idx[static_cast<std::size_t>(i)] < per_axis) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
        done = (i == dim_);
    }
    sup_norm_bound_ = best;
}

Potential Potential::trig_poly(int dim, const std::vector<FourierMode>& modes, double lambda) {
    if (dim < 1) throw std::invalid_argument("Potential: dim must be >= 1");
    Potential f;
    f.kind_ = PotentialKind::TrigPoly;
    f.dim_ = dim;
    f.lambda_ = lambda;

    std::map<std::vector<int>, std::complex<double>> table;
    for (const auto& m : modes) {
        if (static_cast<int>(m.n.size()) != dim)
            throw std::invalid_argument("Potential: mode index has wrong dimension");
        table[m.n] += m.fhat;
    }
    for (const auto& [n, c] : table) {
        if (is_zero_vec(n)) {
            if (std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c)))
                throw std::invalid_argument("Potential: zero mode must be real (hermitian symmetry)");
            f.c0_ = c.real();
            continue;
        }
        auto itc = table.find(negate(n));
        std::complex<double> cc = (itc == table.end()) ? std::complex<double>(0.0) : itc->second;
        if (std::abs(cc - std::conj(c)) > 1e-12 * std::max(1.0, std::abs(c)))
            throw std::invalid_argument("Potential: coefficients are not hermitian");
        if (is_canonical(n)) f.half_.push_back({n, c});
    }
    f.finalize();
    return f;
}

Potential Potential::gevrey(int dim, double sigma, int cutoff,
                            const std::vector<FourierMode>& modes, double lambda) {
    if (!(sigma > 1.0)) throw std::invalid_argument("Potential: Gevrey exponent must be > 1");
    if (cutoff < 0) throw std::invalid_argument("Potential: negative cutoff");
    Potential f = trig_poly(dim, modes, lambda);
    f.kind_ = PotentialKind::GevreyModel;
    f.sigma_ = sigma;
    f.cutoff_ = cutoff;
    if (std::abs(f.c0_) > 1.0 + 1e-12)
        throw std::invalid_argument("Potential: Gevrey decay violated at n = 0");
    for (const auto& hm : f.half_) {
        if (inf_norm(hm.n) > cutoff)
            throw std::invalid_argument("Potential: Gevrey mode beyond cutoff");
        double bound = std::exp(-std::pow(euclid_norm(hm.n), 1.0 / sigma));
        if (std::abs(hm.coeff) > bound * (1.0 + 1e-12))
            throw std::invalid_argument("Potential: Gevrey decay violated");
    }
    return f;
}

Potential Potential::gevrey_saturated(int dim, double sigma, int cutoff, double lambda) {
    std::vector<FourierMode> modes;
    std::vector<int> n(static_cast<std::size_t>(dim), -cutoff);
    bool done = (cutoff == 0 && dim == 0);
    while (!done) {
        if (!is_zero_vec(n)) {
            double c = std::exp(-std::pow(euclid_norm(n), 1.0 / sigma));
            modes.push_back({n, {c, 0.0}});
        } else {
            modes.push_back({n, {1.0, 0.0}});
        }
        int i = 0;
        for (; i < dim; ++i) {
            if (++n[static_cast<std::size_t>(i)] <= cutoff) break;
            n[static_cast<std::size_t>(i)] = -cutoff;
        }
        done = (i == dim);
    }
    return gevrey(dim, sigma, cutoff, modes, lambda);
}

Potential Potential::cosine(double coupling) {
    return trig_poly(1, {{{1}, {0.5, 0.0}}, {{-1}, {0.5, 0.0}}}, coupling);
}

Potential Potential::zero(int dim) {
    return trig_poly(dim, {}, 1.0);
}

double Potential::eval(const TorusPoint& x) const {
    if (x.dim() != dim_) throw std::invalid_argument("Potential::eval: dimension mismatch");
    double s = c0_;
    for (const auto& hm : half_) {
        double theta = 0.0;
        for (int i = 0; i < dim_; ++i)
            theta += hm.n[static_cast<std::size_t>(i)] * x.coords[static_cast<std::size_t>(i)];
        theta *= kTwoPi;
        s += 2.0 * (hm.coeff.real() * std::cos(theta) - hm.coeff.imag() * std::sin(theta));
    }
    if (!std::isfinite(s)) throw std::runtime_error("Potential::eval: non-finite value");
    return lambda_ * s;
}

int Potential::max_mode_degree() const {
    int m = 0;
    for (const auto& hm : half_) m = std::max(m, inf_norm(hm.n));
    return m;
}

std::string Potential::serialize() const {
    std::ostringstream os;
    char buf[64];
    os << "qdlab-potential v1\n";
    os << "kind " << (kind_ == PotentialKind::TrigPoly ? "trigpoly" : "gevrey") << "\n";
    os << "dim " << dim_ << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", lambda_);
    os << "lambda " << buf << "\n";
    if (kind_ == PotentialKind::GevreyModel) {
        std::snprintf(buf, sizeof buf, "%.17g", sigma_);
        os << "sigma " << buf << "\n";
        os << "cutoff " << cutoff_ << "\n";
    }
    os << "modes " << (half_.size() * 2 + (c0_ != 0.0 ? 1 : 0)) << "\n";
    auto write_mode = [&](const std::vector<int>& n, std::complex<double> c) {
        for (int v : n) os << v << " ";
        std::snprintf(buf, sizeof buf, "%.17g", c.real());
        os << buf << " ";
        std::snprintf(buf, sizeof buf, "%.17g", c.imag());
        os << buf << "\n";
    };
    if (c0_ != 0.0) write_mode(std::vector<int>(static_cast<std::size_t>(dim_), 0), {c0_, 0.0});
    for (const auto& hm : half_) {
        write_mode(hm.n, hm.coeff);
        write_mode(negate(hm.n), std::conj(hm.coeff));
    }
    return os.str();
}

Potential Potential::deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string line, tag, word;
    if (!std::getline(is, line) || line != "qdlab-potential v1")
        throw std::invalid_argument("Potential::deserialize: bad header");
    std::string kind;
    int dim = 0, cutoff = 0;
    double lambda = 1.0, sigma = 0.0;
    std::size_t nmodes = 0;
    std::vector<FourierMode> modes;
    while (is >> tag) {
        if (tag == "kind") {
            is >> kind;
        } else if (tag == "dim") {
            is >> dim;
        } else if (tag == "lambda") {
            is >> word;
            lambda = fmt_digit_round_trip(word.c_str());
        } else if (tag == "sigma") {
            is >> word;
            sigma = fmt_digit_round_trip(word.c_str());
        } else if (tag == "cutoff") {
            is >> cutoff;
        } else if (tag == "modes") {
            is >> nmodes;
            for (std::size_t m = 0; m < nmodes; ++m) {
                FourierMode fm;
                fm.n.resize(static_cast<std::size_t>(dim));
                for (int i = 0; i < dim; ++i) is >> fm.n[static_cast<std::size_t>(i)];
                std::string re, im;
                is >> re >> im;
                fm.fhat = {fmt_digit_round_trip(re.c_str()), fmt_digit_round_trip(im.c_str())};
                modes.push_back(std::move(fm));
            }
        } else {
            throw std::invalid_argument("Potential::deserialize: unknown tag " + tag);
        }
    }
    if (kind == "trigpoly") return trig_poly(dim, modes, lambda);
    if (kind == "gevrey") return gevrey(dim, sigma, cutoff, modes, lambda);
    throw std::invalid_argument("Potential::deserialize: unknown kind");
}

// ---------------------------------------------------------------------------
// certified approximants

double CertifiedApprox::eval(const TorusPoint& x) const {
    if (x.dim() != dim) throw std::invalid_argument("CertifiedApprox::eval: dimension mismatch");
    double s = zero_coeff;
    for (const auto& am : half_modes) {
        std::complex<double> factor(1.0, 0.0);
        if (am.taylor_degree.empty()) {
            double theta = 0.0;
            for (int i = 0; i < dim; ++i)
                theta += am.n[static_cast<std::size_t>(i)] * x.coords[static_cast<std::size_t>(i)];
            theta *= kTwoPi;
            factor = {std::cos(theta), std::sin(theta)};
        } else {
            for (int i = 0; i < dim; ++i) {
                int nj = am.n[static_cast<std::size_t>(i)];
                if (nj == 0) continue;
                double theta = kTwoPi * nj * x.coords[static_cast<std::size_t>(i)];
                int deg = am.taylor_degree[static_cast<std::size_t>(i)];
                std::complex<double> term(1.0, 0.0), sum(1.0, 0.0);
                for (int l = 1; l <= deg; ++l) {
                    term *= std::complex<double>(0.0, theta) / double(l);
                    sum += term;
                }
                factor *= sum;
            }
        }
        s += 2.0 * (am.coeff * factor).real();
    }
    return lambda * s;
}

int CertifiedApprox::total_degree() const { return N1; }

Polynomial CertifiedApprox::to_polynomial(std::size_t max_terms) const {
    if (source != Source::Polynomialization)
        throw std::logic_error("to_polynomial: approximant is not polynomial");
    // accumulate complex coefficients over half modes; the conjugate mode
    // contributes the conjugate of every coefficient, so the final map is
    // 2 Re of the accumulated one (plus the zero mode)
    std::map<std::vector<int>, std::complex<double>> acc;
    acc[std::vector<int>(static_cast<std::size_t>(dim), 0)] = zero_coeff / 2.0;
    for (const auto& am : half_modes) {
        std::map<std::vector<int>, std::complex<double>> mode;
        mode[std::vector<int>(static_cast<std::size_t>(dim), 0)] = am.coeff;
        for (int i = 0; i < dim; ++i) {
            int nj = am.n[static_cast<std::size_t>(i)];
            if (nj == 0) continue;
            int deg = am.taylor_degree[static_cast<std::size_t>(i)];
            std::map<std::vector<int>, std::complex<double>> next;
            std::complex<double> axis_coeff(1.0, 0.0);
            for (int l = 0; l <= deg; ++l) {
                if (l > 0) axis_coeff *= std::complex<double>(0.0, kTwoPi * nj) / double(l);
                for (const auto& [e, c] : mode) {
                    std::vector<int> e2 = e;
                    e2[static_cast<std::size_t>(i)] += l;
                    next[e2] += c * axis_coeff;
                }
            }
            mode.swap(next);
            if (mode.size() > max_terms)
                throw std::runtime_error("to_polynomial: term count limit exceeded");
        }
        for (const auto& [e, c] : mode) acc[e] += c;
        if (acc.size() > max_terms)
            throw std::runtime_error("to_polynomial: term count limit exceeded");
    }
    Polynomial p(dim);
    for (const auto& [e, c] : acc) {
        double coeff = lambda * 2.0 * c.real();
        if (coeff != 0.0) p.add_term(e, coeff);
    }
    return p;
}

CertifiedApprox truncate_fourier(const Potential& f, int N0) {
    if (N0 < 0) throw std::invalid_argument("truncate_fourier: N0 must be >= 0");
    CertifiedApprox t;
    t.source = CertifiedApprox::Source::FourierTruncation;
    t.dim = f.dim();
    t.lambda = f.coupling();
    t.N0 = N0;
    t.N1 = 0;
    t.zero_coeff = f.zero_coeff();

    double dropped = 0.0;
    for (const auto& hm : f.half_modes()) {
        if (inf_norm(hm.n) <= N0)
            t.half_modes.push_back({hm.n, hm.coeff, {}});
        else
            dropped += 2.0 * std::abs(hm.coeff);
    }

    if (f.kind() == PotentialKind::TrigPoly) {
        t.sup_error = std::abs(f.coupling()) * dropped;
    } else {
        // class tail: sum of the decay envelope over every |n|_inf > N0,
        // which dominates the dropped stored modes as well
        double sigma = f.sigma();
        double tail = 0.0;
        double term = 0.0;
        long long m = N0 + 1;
        for (; m <= 10000000; ++m) {
            term = shell_count(f.dim(), m) * std::exp(-std::pow(double(m), 1.0 / sigma));
            tail += term;
            if (term < 1e-30 * tail) break;
        }
        // geometric-style remainder for the un-summed range
        tail += term * (4.0 * sigma * std::pow(double(m), 1.0 - 1.0 / sigma) + 4.0);
        t.sup_error = std::abs(f.coupling()) * tail;
    }
    return t;
}

namespace {

// log of the Taylor remainder bound for exp(i theta) at degree m
double log_taylor_remainder(double theta, int m) {
    if (theta <= 0.0) return -std::numeric_limits<double>::infinity();
    if (m == 0) return std::log(std::min(theta, 2.0));
    return (m + 1) * std::log(theta) - std::lgamma(double(m) + 2.0);
}

int minimal_taylor_degree(double theta, double log_tol, int cap) {
    for (int m = 0; m <= cap; ++m)
        if (log_taylor_remainder(theta, m) <= log_tol) return m;
    throw std::runtime_error("polynomialize: required Taylor degree exceeds cap");
}

}  // namespace

CertifiedApprox polynomialize(const CertifiedApprox& t, double tol, int degree_cap) {
    if (t.source != CertifiedApprox::Source::FourierTruncation)
        throw std::invalid_argument("polynomialize: input must be a Fourier truncation");
    if (!(tol > 0.0)) throw std::invalid_argument("polynomialize: tol must be > 0");

    CertifiedApprox p = t;
    p.source = CertifiedApprox::Source::Polynomialization;

    if (t.half_modes.empty()) {
        p.N1 = 0;
        return p;  // constant approximant is exact
    }

    std::size_t num_modes = 2 * t.half_modes.size() + (t.zero_coeff != 0.0 ? 1 : 0);
    double max_coeff = 0.0;
    for (const auto& am : t.half_modes)
        max_coeff = std::max(max_coeff, std::abs(t.lambda) * std::abs(am.coeff));
    max_coeff = std::max(max_coeff, std::abs(t.lambda) * std::abs(t.zero_coeff));
    double log_tol = std::log(std::max(tol, 1e-290)) -
                     std::log(double(num_modes) * std::max(max_coeff, 1e-300));

    int n1 = 0;
    double poly_error = 0.0;
    for (auto& am : p.half_modes) {
        am.taylor_degree.assign(static_cast<std::size_t>(p.dim), 0);
        double rem_sum = 0.0, rem_prod = 1.0;
        int mode_total = 0;
        bool all_zero_deg = true;
        for (int i = 0; i < p.dim; ++i) {
            int nj = am.n[static_cast<std::size_t>(i)];
            if (nj == 0) continue;
            double theta = std::numbers::pi * std::abs(nj);  // |x_i| <= 1/2
            int m = minimal_taylor_degree(theta, log_tol, degree_cap);
            am.taylor_degree[static_cast<std::size_t>(i)] = m;
            double rem = std::exp(log_taylor_remainder(theta, m));
            rem_sum += rem;
            rem_prod *= 1.0 + rem;
            mode_total += m;
            if (m != 0) all_zero_deg = false;
        }
        double e_mode = rem_sum * rem_prod;          // telescoped product bound
        e_mode = std::min(e_mode, 1.0 + rem_prod);   // both factors lie in the unit-ish disc
        if (all_zero_deg) e_mode = std::min(e_mode, 2.0);
        poly_error += 2.0 * std::abs(t.lambda) * std::abs(am.coeff) * e_mode;
        n1 = std::max(n1, mode_total);
    }
    p.N1 = n1;
    p.sup_error = t.sup_error + poly_error;  // stage errors accumulate
    return p;
}

}  // namespace qdlab
