#include "qdlab/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace qdlab {

void Polynomial::add_term(const std::vector<int>& exps, double coeff) {
    if (static_cast<int>(exps.size()) != nvars_)
        throw std::invalid_argument("Polynomial: exponent tuple has wrong arity");
    for (int e : exps)
        if (e < 0) throw std::invalid_argument("Polynomial: negative exponent");
    auto it = coeffs_.find(exps);
    if (it == coeffs_.end()) {
        if (coeff != 0.0) coeffs_.emplace(exps, coeff);
    } else {
        it->second += coeff;
        if (it->second == 0.0) coeffs_.erase(it);
    }
}

double Polynomial::coefficient(const std::vector<int>& exps) const {
    auto it = coeffs_.find(exps);
    return it == coeffs_.end() ? 0.0 : it->second;
}

int Polynomial::total_degree() const {
    int deg = 0;
    for (const auto& [exps, c] : coeffs_) {
        int d = 0;
        for (int e : exps) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

double neumaier_sum(std::span<const double> terms) {
    double sum = 0.0, comp = 0.0;
    for (double t : terms) {
        double s = sum + t;
        if (std::abs(sum) >= std::abs(t))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
    }
    return sum + comp;
}

double Polynomial::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != nvars_)
        throw std::invalid_argument("Polynomial::eval: wrong point dimension");
    double sum = 0.0, comp = 0.0;
    for (const auto& [exps, c] : coeffs_) {
        double t = c;
        for (int i = 0; i < nvars_; ++i) {
            double xe = 1.0;
            double base = x[static_cast<std::size_t>(i)];
            for (int e = 0; e < exps[static_cast<std::size_t>(i)]; ++e) xe *= base;
            t *= xe;
        }
        double s = sum + t;
        if (std::abs(sum) >= std::abs(t))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
    }
    return sum + comp;
}

}  // namespace qdlab
