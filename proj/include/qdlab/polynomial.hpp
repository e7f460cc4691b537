#pragma once

#include <map>
#include <span>
#include <vector>

namespace qdlab {

// Multivariate polynomial with real coefficients, stored as a map from
// per-variable exponent tuples to coefficients. Evaluation uses Neumaier
// compensated summation so membership tests near a threshold are stable.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    int nvars() const { return nvars_; }
    void add_term(const std::vector<int>& exps, double coeff);
    double coefficient(const std::vector<int>& exps) const;
    int total_degree() const;
    std::size_t num_terms() const { return coeffs_.size(); }

    double eval(std::span<const double> x) const;

    const std::map<std::vector<int>, double>& terms() const { return coeffs_; }

private:
    int nvars_ = 0;
    std::map<std::vector<int>, double> coeffs_;
};

// Compensated sum of a sequence of doubles.
double neumaier_sum(std::span<const double> terms);

}  // namespace qdlab
