#include "adt/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adt/errors.hpp"

namespace adt {

namespace {

void check_probs(const std::vector<double>& probs) {
    if (probs.empty()) throw EmptyInput("categorical support must be non-empty");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw NegativeEntry("categorical entry < 0 (or NaN)");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw AdtError("categorical does not sum to 1 (sum = " + std::to_string(sum) + ")");
}

}  // namespace

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
    check_probs(probs_);
}

Categorical Categorical::uniform(std::size_t n) {
    if (n == 0) throw EmptyInput("categorical support must be non-empty");
    return Categorical(std::vector<double>(n, 1.0 / static_cast<double>(n)), Unchecked{});
}

Categorical Categorical::dirac(std::size_t n, std::size_t k) {
    if (n == 0) throw EmptyInput("categorical support must be non-empty");
    if (k >= n) throw OutOfRange("dirac index out of range");
    std::vector<double> p(n, 0.0);
    p[k] = 1.0;
    return Categorical(std::move(p), Unchecked{});
}

Categorical Categorical::from_unnormalized(std::vector<double> raw) {
    if (raw.empty()) throw EmptyInput("categorical support must be non-empty");
    double sum = 0.0;
    for (double v : raw) {
        if (!(v >= 0.0)) throw NegativeEntry("entry < 0 in unnormalized vector");
        sum += v;
    }
    if (sum <= 0.0) throw ZeroColumn("unnormalized vector sums to 0");
    for (double& v : raw) v /= sum;
    return Categorical(std::move(raw), Unchecked{});
}

Cpt::Cpt(Tensor values) : values_(std::move(values)) {
    if (values_.rank() == 0 || values_.size() == 0)
        throw EmptyInput("cpt must have at least one axis and one entry");
    const std::size_t n = values_.shape()[0];
    const std::size_t cols = values_.num_columns();
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = values_.column_entry(i, c);
            if (!(v >= 0.0)) throw NegativeEntry("cpt entry < 0 at column " + std::to_string(c));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw AdtError("cpt column " + std::to_string(c) + " does not sum to 1");
    }
}

Categorical Cpt::column(std::size_t col) const {
    const std::size_t n = child_size();
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = values_.column_entry(i, col);
    return Categorical(std::move(p));
}

DirichletParams::DirichletParams(Tensor conc) : conc_(std::move(conc)) {
    if (conc_.size() == 0) throw EmptyInput("dirichlet parameters must be non-empty");
    for (std::size_t i = 0; i < conc_.size(); ++i)
        if (!(conc_[i] > 0.0))
            throw NonPositiveConcentration("concentration entry " + std::to_string(i) +
                                           " is not positive");
}

double DirichletParams::total_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < conc_.size(); ++i) s += conc_[i];
    return s;
}

Cpt normalize(const Tensor& raw) {
    if (raw.rank() == 0 || raw.size() == 0) throw EmptyInput("cannot normalize an empty array");
    Tensor out = raw;
    const std::size_t n = raw.shape()[0];
    const std::size_t cols = raw.num_columns();
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = raw.column_entry(i, c);
            if (!(v >= 0.0))
                throw NegativeEntry("negative entry in column " + std::to_string(c));
            sum += v;
        }
        if (sum <= 0.0) throw ZeroColumn("column " + std::to_string(c) + " sums to 0");
        for (std::size_t i = 0; i < n; ++i) out.column_entry(i, c) = raw.column_entry(i, c) / sum;
    }
    return Cpt(std::move(out));
}

Categorical softmax(const std::vector<double>& logits, double gamma) {
    if (logits.empty()) throw EmptyInput("softmax over empty support");
    if (!(gamma > 0.0)) throw InvalidArgument("softmax precision must be positive");
    double max_scaled = -std::numeric_limits<double>::infinity();
    for (double x : logits) {
        if (!std::isfinite(x)) throw NonFiniteInput("softmax logit is not finite");
        max_scaled = std::max(max_scaled, gamma * x);
    }
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(gamma * logits[i] - max_scaled);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return Categorical(std::move(p));
}

double kl_divergence(const Categorical& q, const Categorical& p) {
    if (q.size() != p.size()) throw SupportMismatch("kl divergence over mismatched supports");
    double kl = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0.0) continue;  // 0 * ln(0/p) == 0
        if (p[i] == 0.0)
            throw AbsoluteContinuityViolation("q places mass where p has none (index " +
                                              std::to_string(i) + ")");
        kl += q[i] * std::log(q[i] / p[i]);
    }
    return std::max(kl, 0.0);
}

double entropy_raw(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return std::max(h, 0.0);
}

double entropy(const Categorical& q) { return entropy_raw(q.probs()); }

Tensor outer_product(const std::vector<std::vector<double>>& factors) {
    if (factors.empty()) throw EmptyInput("outer product of zero factors");
    std::vector<std::size_t> shape;
    shape.reserve(factors.size());
    for (const auto& f : factors) {
        if (f.empty()) throw EmptyInput("outer product factor is empty");
        shape.push_back(f.size());
    }
    Tensor out(std::move(shape));
    // Build incrementally: after processing factor k the first `len` entries
    // hold the flattened rank-(k+1) product.
    out[0] = 1.0;
    std::size_t len = 1;
    for (const auto& f : factors) {
        for (std::size_t i = len; i-- > 0;) {
            const double base = out[i];
            for (std::size_t j = f.size(); j-- > 0;) out[i * f.size() + j] = base * f[j];
        }
        len *= f.size();
    }
    return out;
}

Cpt dirichlet_mean(const DirichletParams& d) {
    return normalize(d.conc());
}

std::size_t sample(const Categorical& q, Rng& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        cum += q[i];
        if (u < cum) return i;
    }
    // Guard against cum falling a few ulps short of 1: return the last
    // state with positive mass.
    for (std::size_t i = q.size(); i-- > 0;)
        if (q[i] > 0.0) return i;
    return q.size() - 1;
}

}  // namespace adt
