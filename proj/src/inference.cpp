#include "adt/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "adt/errors.hpp"

namespace adt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Joint-state iteration helpers. Joint indices are row-major over the factor
// cardinalities, matching the layout of the factor axes in A.
struct JointSpace {
    std::vector<std::size_t> cards;
    std::vector<std::size_t> strides;
    std::size_t total = 1;

    explicit JointSpace(const GenerativeModel& m) {
        cards.reserve(m.factors.size());
        for (const auto& f : m.factors) cards.push_back(f.cardinality);
        // Row-major: the stride of factor f is the product of the cards after it.
        strides.assign(cards.size(), 1);
        for (std::size_t f = cards.size(); f-- > 0;) {
            strides[f] = total;
            total *= cards[f];
        }
    }

    std::size_t factor_state(std::size_t joint, std::size_t f) const {
        return (joint / strides[f]) % cards[f];
    }
};

// ln A^m[o_m | joint state], or -inf where the likelihood is zero.
std::vector<double> log_likelihood_slice(const GenerativeModel& m, std::size_t modality,
                                         std::size_t o, const JointSpace& js) {
    const Tensor& a = m.A[modality].tensor();
    if (o >= m.modalities[modality].cardinality)
        throw OutOfRange("observation index out of range for modality " +
                         m.modalities[modality].name);
    if (a.num_columns() != js.total)
        throw ShapeMismatch("A parent axes do not match the factor space");
    std::vector<double> out(js.total);
    for (std::size_t jidx = 0; jidx < js.total; ++jidx) {
        const double v = a.column_entry(o, jidx);
        out[jidx] = v > 0.0 ? std::log(v) : kNegInf;
    }
    return out;
}

double expect_joint(const std::vector<double>& logs, const JointSpace& js,
                    const std::vector<const std::vector<double>*>& qs) {
    double acc = 0.0;
    for (std::size_t jidx = 0; jidx < js.total; ++jidx) {
        double w = 1.0;
        for (std::size_t f = 0; f < js.cards.size(); ++f)
            w *= (*qs[f])[js.factor_state(jidx, f)];
        if (w == 0.0) continue;  // 0 * ln 0 == 0
        if (logs[jidx] == kNegInf) return std::numeric_limits<double>::infinity();
        acc += w * logs[jidx];
    }
    return acc;
}

}  // namespace

double compute_vfe(const GenerativeModel& model, const Belief& q, const ObservationBundle& obs,
                   const Belief& prior) {
    if (q.factors.size() != model.factors.size() || prior.factors.size() != model.factors.size())
        throw ShapeMismatch("belief factor count does not match model");
    if (obs.observed.size() != model.modalities.size())
        throw ShapeMismatch("observation bundle does not match modality count");

    double vfe = 0.0;
    // E_Q[ln Q] - E_Q[ln prior], both factorize over the mean field.
    for (std::size_t f = 0; f < model.factors.size(); ++f) {
        const auto& qf = q.factors[f].probs();
        const auto& pf = prior.factors[f].probs();
        for (std::size_t i = 0; i < qf.size(); ++i) {
            if (qf[i] == 0.0) continue;
            if (pf[i] == 0.0) return std::numeric_limits<double>::infinity();
            vfe += qf[i] * (std::log(qf[i]) - std::log(pf[i]));
        }
    }

    JointSpace js(model);
    std::vector<const std::vector<double>*> qs;
    qs.reserve(q.factors.size());
    for (const auto& qf : q.factors) qs.push_back(&qf.probs());
    for (std::size_t m = 0; m < model.modalities.size(); ++m) {
        if (!obs.observed[m]) continue;
        const double ell = expect_joint(log_likelihood_slice(model, m, *obs.observed[m], js), js, qs);
        if (std::isinf(ell)) return std::numeric_limits<double>::infinity();
        vfe -= ell;
    }
    return vfe;
}

InferenceResult infer_state(const GenerativeModel& model, const Belief& prior,
                            const ObservationBundle& obs, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw InvalidArgument("inference tolerance must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (prior.factors.size() != model.factors.size())
        throw ShapeMismatch("prior factor count does not match model");
    if (obs.observed.size() != model.modalities.size())
        throw ShapeMismatch("observation bundle does not match modality count");

    JointSpace js(model);
    const std::size_t F = model.factors.size();

    // Cache the observed-modality log-likelihood slices once.
    std::vector<std::vector<double>> log_slices;
    for (std::size_t m = 0; m < model.modalities.size(); ++m)
        if (obs.observed[m])
            log_slices.push_back(log_likelihood_slice(model, m, *obs.observed[m], js));

    std::vector<std::vector<double>> q;
    q.reserve(F);
    for (std::size_t f = 0; f < F; ++f) q.push_back(prior.factors[f].probs());

    std::vector<std::vector<double>> log_prior(F);
    for (std::size_t f = 0; f < F; ++f) {
        log_prior[f].resize(q[f].size());
        for (std::size_t i = 0; i < q[f].size(); ++i)
            log_prior[f][i] = prior.factors[f][i] > 0.0 ? std::log(prior.factors[f][i]) : kNegInf;
    }

    auto make_belief = [&q]() {
        Belief b;
        b.factors.reserve(q.size());
        for (const auto& qf : q) b.factors.emplace_back(qf);
        return b;
    };

    InferenceResult result;
    double prev_vfe = compute_vfe(model, make_belief(), obs, prior);
    bool converged = false;
    std::size_t sweeps = 0;

    std::vector<double> logq;
    while (sweeps < max_iter && !converged) {
        for (std::size_t f = 0; f < F; ++f) {
            const std::size_t n = js.cards[f];
            logq.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) logq[i] = log_prior[f][i];

            for (const auto& slice : log_slices) {
                // E over co-factors of ln A[o | d_f = i, d_{-f}], with the
                // 0 * ln 0 convention on co-factor weights.
                for (std::size_t jidx = 0; jidx < js.total; ++jidx) {
                    const std::size_t i = js.factor_state(jidx, f);
                    if (logq[i] == kNegInf) continue;
                    double w = 1.0;
                    for (std::size_t g = 0; g < F; ++g) {
                        if (g == f) continue;
                        w *= q[g][js.factor_state(jidx, g)];
                    }
                    if (w == 0.0) continue;
                    if (slice[jidx] == kNegInf)
                        logq[i] = kNegInf;
                    else
                        logq[i] += w * slice[jidx];
                }
            }

            double mx = kNegInf;
            for (double v : logq) mx = std::max(mx, v);
            if (mx == kNegInf)
                throw ContradictoryEvidence(
                    "factor " + model.factors[f].name +
                    ": observation has zero likelihood under every prior-supported state");
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                q[f][i] = logq[i] == kNegInf ? 0.0 : std::exp(logq[i] - mx);
                sum += q[f][i];
            }
            for (std::size_t i = 0; i < n; ++i) q[f][i] /= sum;
        }

        ++sweeps;
        const double vfe = compute_vfe(model, make_belief(), obs, prior);
        result.vfe_history.push_back(vfe);
        if (std::abs(prev_vfe - vfe) < tol) converged = true;
        prev_vfe = vfe;
    }

    result.posterior = make_belief();
    result.vfe = prev_vfe;
    result.iterations = sweeps;
    result.converged = converged;
    return result;
}

}  // namespace adt
