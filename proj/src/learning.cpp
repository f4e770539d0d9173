#include "adt/learning.hpp"

#include <string>

#include "adt/errors.hpp"

namespace adt {

namespace {

void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("learning rate must lie in [0, 1]");
}

}  // namespace

DirichletParams update_A(const DirichletParams& conc, std::size_t obs, const Belief& posterior,
                         double eta) {
    check_eta(eta);
    const Tensor& t = conc.conc();
    if (t.rank() != posterior.factors.size() + 1)
        throw ShapeMismatch("concentration rank does not match observation x factors");
    if (obs >= t.shape()[0]) throw ShapeMismatch("observation index out of range");
    for (std::size_t f = 0; f < posterior.factors.size(); ++f)
        if (t.shape()[f + 1] != posterior.factors[f].size())
            throw ShapeMismatch("factor " + std::to_string(f) + " size mismatch");

    Tensor out = t;
    if (eta > 0.0) {
        std::vector<std::vector<double>> probs;
        probs.reserve(posterior.factors.size());
        for (const auto& q : posterior.factors) probs.push_back(q.probs());
        const Tensor evidence = outer_product(probs);
        const std::size_t cols = t.num_columns();
        for (std::size_t c = 0; c < cols; ++c)
            out.column_entry(obs, c) += eta * evidence[c];
    }
    return DirichletParams(std::move(out));
}

DirichletParams update_B(const DirichletParams& conc, const Categorical& q_now,
                         const Categorical& q_prev, std::size_t control, double eta,
                         bool learnable) {
    check_eta(eta);
    if (!learnable) throw FrozenArray("transition array is not subject to learning updates");
    const Tensor& t = conc.conc();
    if (t.rank() != 3) throw ShapeMismatch("transition concentrations must be rank 3");
    const std::size_t n = t.shape()[0];
    const std::size_t nu = t.shape()[2];
    if (t.shape()[1] != n) throw ShapeMismatch("transition concentrations must be square");
    if (q_now.size() != n || q_prev.size() != n)
        throw ShapeMismatch("belief size does not match transition support");
    if (control >= nu) throw UnknownControlIndex("control index out of range");

    Tensor out = t;
    if (eta > 0.0) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                out[(j * n + i) * nu + control] += eta * q_now[j] * q_prev[i];
    }
    return DirichletParams(std::move(out));
}

DirichletParams update_d(const DirichletParams& conc, const Categorical& q_now, double eta) {
    check_eta(eta);
    const Tensor& t = conc.conc();
    if (t.rank() != 1 || t.shape()[0] != q_now.size())
        throw ShapeMismatch("prior concentrations do not match belief support");
    Tensor out = t;
    for (std::size_t i = 0; i < q_now.size(); ++i) out[i] += eta * q_now[i];
    return DirichletParams(std::move(out));
}

GenerativeModel learn(const GenerativeModel& model, const ObservationBundle& obs,
                      const Belief& posterior,
                      const std::optional<Belief>& previous_posterior,
                      std::optional<std::size_t> previous_action, const LearningConfig& config) {
    GenerativeModel out = model;

    if (config.learn_A && config.eta_A > 0.0) {
        for (std::size_t m = 0; m < out.modalities.size(); ++m) {
            if (!out.modalities[m].learnable_likelihood || !out.dirichlet_a[m]) continue;
            if (!obs.observed[m]) continue;
            out.dirichlet_a[m] =
                update_A(*out.dirichlet_a[m], *obs.observed[m], posterior, config.eta_A);
            out.A[m] = dirichlet_mean(*out.dirichlet_a[m]);
        }
    }

    if (config.learn_B && config.eta_B > 0.0 && previous_posterior && previous_action) {
        if (*previous_action >= model.num_actions())
            throw UnknownAction("previous action out of range");
        for (std::size_t f = 0; f < out.factors.size(); ++f) {
            if (!out.factors[f].learnable_transitions || !out.dirichlet_b[f]) continue;
            const std::size_t u = model.control_map[*previous_action][f];
            out.dirichlet_b[f] =
                update_B(*out.dirichlet_b[f], posterior.factors[f],
                         previous_posterior->factors[f], u, config.eta_B, true);
            out.B[f] = dirichlet_mean(*out.dirichlet_b[f]);
        }
    }

    if (config.learn_d && config.eta_d > 0.0) {
        for (std::size_t f = 0; f < out.factors.size(); ++f) {
            if (!out.dirichlet_d[f]) continue;
            out.dirichlet_d[f] = update_d(*out.dirichlet_d[f], posterior.factors[f], config.eta_d);
            out.d[f] = dirichlet_mean(*out.dirichlet_d[f]).column(0);
        }
    }

    return out;
}

}  // namespace adt
