#ifndef ADT_CATEGORICAL_HPP
#define ADT_CATEGORICAL_HPP

#include <cstddef>
#include <vector>

#include "adt/rng.hpp"
#include "adt/tensor.hpp"

namespace adt {

// Absolute tolerance for probability-sum checks throughout the library.
inline constexpr double kProbTol = 1e-12;

// Normalized distribution over a finite support. Immutable after construction.
class Categorical {
public:
    explicit Categorical(std::vector<double> probs);

    static Categorical uniform(std::size_t n);
    static Categorical dirac(std::size_t n, std::size_t k);
    // Normalizes a nonnegative vector; throws ZeroColumn / NegativeEntry.
    static Categorical from_unnormalized(std::vector<double> raw);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const { return probs_; }

    bool operator==(const Categorical& other) const = default;

private:
    struct Unchecked {};
    Categorical(std::vector<double> probs, Unchecked) : probs_(std::move(probs)) {}

    std::vector<double> probs_;
};

// Conditional probability table: child variable on axis 0, every column over
// the child is a valid Categorical.
class Cpt {
public:
    explicit Cpt(Tensor values);

    const Tensor& tensor() const { return values_; }
    const std::vector<std::size_t>& shape() const { return values_.shape(); }
    std::size_t child_size() const { return values_.shape()[0]; }
    std::size_t num_columns() const { return values_.num_columns(); }

    Categorical column(std::size_t col) const;

    bool operator==(const Cpt& other) const = default;

private:
    Tensor values_;
};

// Strictly positive concentration array shadowing a CPT of the same shape.
class DirichletParams {
public:
    explicit DirichletParams(Tensor conc);

    const Tensor& conc() const { return conc_; }
    const std::vector<std::size_t>& shape() const { return conc_.shape(); }
    double total_mass() const;

    bool operator==(const DirichletParams& other) const = default;

private:
    Tensor conc_;
};

// Column-normalizes a nonnegative array (child variable on axis 0).
Cpt normalize(const Tensor& raw);

// sigma(gamma * logits): max-subtracted, precision-scaled softmax.
Categorical softmax(const std::vector<double>& logits, double gamma);

double kl_divergence(const Categorical& q, const Categorical& p);
double entropy(const Categorical& q);

// Fully generic variants used by internal code on raw probability vectors.
double entropy_raw(const std::vector<double>& p);

Tensor outer_product(const std::vector<std::vector<double>>& factors);

Cpt dirichlet_mean(const DirichletParams& d);

// Inverse-CDF draw; identical rng state yields the identical index.
std::size_t sample(const Categorical& q, Rng& rng);

}  // namespace adt

#endif
