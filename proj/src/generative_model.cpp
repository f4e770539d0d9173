#include "adt/generative_model.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "adt/errors.hpp"

namespace adt {

namespace {

using nlohmann::json;

std::vector<std::size_t> expected_a_shape(const GenerativeModel& m, std::size_t modality) {
    std::vector<std::size_t> shape{m.modalities[modality].cardinality};
    for (const auto& f : m.factors) shape.push_back(f.cardinality);
    return shape;
}

// Contracts the trailing axis of a row-major tensor slice with a vector.
void contract_last(const std::vector<double>& in, std::size_t inner, const std::vector<double>& v,
                   std::vector<double>& out) {
    const std::size_t blocks = in.size() / inner;
    out.assign(blocks, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        double acc = 0.0;
        const double* row = in.data() + b * inner;
        for (std::size_t k = 0; k < inner; ++k) acc += row[k] * v[k];
        out[b] = acc;
    }
}

}  // namespace

ValidationReport validate(const GenerativeModel& m) {
    ValidationReport report;
    auto add = [&report](ViolationKind kind, std::string where) {
        report.violations.push_back({kind, std::move(where)});
    };

    for (std::size_t f = 0; f < m.factors.size(); ++f) {
        if (m.factors[f].cardinality < 1)
            add(ViolationKind::MetadataViolation, "factor " + m.factors[f].name + ": cardinality");
        if (m.factors[f].control_cardinality < 1)
            add(ViolationKind::MetadataViolation,
                "factor " + m.factors[f].name + ": control cardinality");
    }
    for (const auto& mod : m.modalities)
        if (mod.cardinality < 1)
            add(ViolationKind::MetadataViolation, "modality " + mod.name + ": cardinality");

    if (m.A.size() != m.modalities.size())
        add(ViolationKind::ShapeViolation, "A: expected one table per modality");
    if (m.B.size() != m.factors.size())
        add(ViolationKind::ShapeViolation, "B: expected one table per factor");
    if (m.c.size() != m.modalities.size())
        add(ViolationKind::ShapeViolation, "c: expected one vector per modality");
    if (m.d.size() != m.factors.size())
        add(ViolationKind::ShapeViolation, "d: expected one prior per factor");

    for (std::size_t mm = 0; mm < m.A.size() && mm < m.modalities.size(); ++mm) {
        if (m.A[mm].shape() != expected_a_shape(m, mm))
            add(ViolationKind::ShapeViolation, "A[" + m.modalities[mm].name + "]: shape");
        // Column normalization is enforced by the Cpt type at construction;
        // re-check here so hand-assembled models still get a full report.
        const Tensor& t = m.A[mm].tensor();
        const std::size_t cols = t.num_columns();
        for (std::size_t cidx = 0; cidx < cols; ++cidx) {
            double sum = 0.0;
            bool neg = false;
            for (std::size_t i = 0; i < t.shape()[0]; ++i) {
                const double v = t.column_entry(i, cidx);
                if (v < 0.0) neg = true;
                sum += v;
            }
            if (neg)
                add(ViolationKind::NegativeEntry,
                    "A[" + m.modalities[mm].name + "] column " + std::to_string(cidx));
            else if (std::abs(sum - 1.0) > kProbTol)
                add(ViolationKind::NormalizationViolation,
                    "A[" + m.modalities[mm].name + "] column " + std::to_string(cidx));
        }
    }

    for (std::size_t f = 0; f < m.B.size() && f < m.factors.size(); ++f) {
        const std::vector<std::size_t> want{m.factors[f].cardinality, m.factors[f].cardinality,
                                            m.factors[f].control_cardinality};
        if (m.B[f].shape() != want)
            add(ViolationKind::ShapeViolation, "B[" + m.factors[f].name + "]: shape");
        const Tensor& t = m.B[f].tensor();
        for (std::size_t cidx = 0; cidx < t.num_columns(); ++cidx) {
            double sum = 0.0;
            for (std::size_t i = 0; i < t.shape()[0]; ++i) sum += t.column_entry(i, cidx);
            if (std::abs(sum - 1.0) > kProbTol)
                add(ViolationKind::NormalizationViolation,
                    "B[" + m.factors[f].name + "] column " + std::to_string(cidx));
        }
    }

    for (std::size_t mm = 0; mm < m.c.size() && mm < m.modalities.size(); ++mm)
        if (m.c[mm].size() != m.modalities[mm].cardinality)
            add(ViolationKind::ShapeViolation, "c[" + m.modalities[mm].name + "]: length");

    for (std::size_t f = 0; f < m.d.size() && f < m.factors.size(); ++f)
        if (m.d[f].size() != m.factors[f].cardinality)
            add(ViolationKind::ShapeViolation, "d[" + m.factors[f].name + "]: length");

    if (m.dirichlet_a.size() != m.A.size())
        add(ViolationKind::ShapeViolation, "dirichlet_a: expected one slot per modality");
    if (m.dirichlet_b.size() != m.B.size())
        add(ViolationKind::ShapeViolation, "dirichlet_b: expected one slot per factor");
    if (m.dirichlet_d.size() != m.d.size())
        add(ViolationKind::ShapeViolation, "dirichlet_d: expected one slot per factor");

    for (std::size_t mm = 0; mm < m.dirichlet_a.size() && mm < m.A.size(); ++mm)
        if (m.dirichlet_a[mm] && m.dirichlet_a[mm]->shape() != m.A[mm].shape())
            add(ViolationKind::ShapeViolation, "dirichlet_a[" + std::to_string(mm) + "]: shape");
    for (std::size_t f = 0; f < m.dirichlet_b.size() && f < m.B.size(); ++f)
        if (m.dirichlet_b[f] && m.dirichlet_b[f]->shape() != m.B[f].shape())
            add(ViolationKind::ShapeViolation, "dirichlet_b[" + std::to_string(f) + "]: shape");
    for (std::size_t f = 0; f < m.dirichlet_d.size() && f < m.d.size(); ++f)
        if (m.dirichlet_d[f] &&
            m.dirichlet_d[f]->shape() != std::vector<std::size_t>{m.d[f].size()})
            add(ViolationKind::ShapeViolation, "dirichlet_d[" + std::to_string(f) + "]: shape");

    if (m.control_map.empty()) add(ViolationKind::ControlMapGap, "control_map: empty");
    for (std::size_t a = 0; a < m.control_map.size(); ++a) {
        if (m.control_map[a].size() != m.factors.size()) {
            add(ViolationKind::ControlMapGap,
                "control_map: action " + std::to_string(a) + " missing factor entries");
            continue;
        }
        for (std::size_t f = 0; f < m.factors.size(); ++f)
            if (m.control_map[a][f] >= m.factors[f].control_cardinality)
                add(ViolationKind::ControlMapGap, "control_map: action " + std::to_string(a) +
                                                      ", factor " + m.factors[f].name);
    }

    return report;
}

Categorical predict_observation(const GenerativeModel& model, const Belief& belief,
                                std::size_t modality) {
    if (modality >= model.A.size()) throw UnknownModality("modality index out of range");
    if (belief.factors.size() != model.factors.size())
        throw ShapeMismatch("belief factor count does not match model");

    // Contract factor axes from the last to the first; what remains is the
    // distribution over the observation axis.
    std::vector<double> cur = model.A[modality].tensor().data();
    std::vector<double> next;
    for (std::size_t f = model.factors.size(); f-- > 0;) {
        contract_last(cur, model.factors[f].cardinality, belief.factors[f].probs(), next);
        cur.swap(next);
    }
    return Categorical::from_unnormalized(std::move(cur));
}

Belief propagate(const GenerativeModel& model, const Belief& belief, std::size_t action) {
    if (action >= model.control_map.size()) throw UnknownAction("action index out of range");
    if (belief.factors.size() != model.factors.size())
        throw ShapeMismatch("belief factor count does not match model");

    Belief out;
    out.factors.reserve(model.factors.size());
    for (std::size_t f = 0; f < model.factors.size(); ++f) {
        const std::size_t u = model.control_map[action][f];
        const Tensor& b = model.B[f].tensor();
        const std::size_t n = model.factors[f].cardinality;
        const std::size_t nu = model.factors[f].control_cardinality;
        const auto& q = belief.factors[f].probs();
        std::vector<double> next(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += b[(j * n + i) * nu + u] * q[i];
            next[j] = acc;
        }
        out.factors.push_back(Categorical::from_unnormalized(std::move(next)));
    }
    return out;
}

namespace {

json tensor_to_json(const Tensor& t) {
    json j;
    j["shape"] = t.shape();
    j["data"] = t.data();
    return j;
}

Tensor tensor_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
        throw SchemaError(path + ": expected object with shape and data");
    std::vector<std::size_t> shape;
    std::vector<double> data;
    try {
        shape = j.at("shape").get<std::vector<std::size_t>>();
        data = j.at("data").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw SchemaError(path + ": malformed shape or data");
    }
    if (data.size() != Tensor::count(shape))
        throw SchemaError(path + ": data length does not match shape");
    return Tensor(std::move(shape), std::move(data));
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw SchemaError(path + "/" + key);
    return j.at(key);
}

}  // namespace

std::string serialize(const GenerativeModel& m) {
    json j;
    j["factors"] = json::array();
    for (const auto& f : m.factors)
        j["factors"].push_back({{"name", f.name},
                                {"cardinality", f.cardinality},
                                {"control_cardinality", f.control_cardinality},
                                {"learnable_transitions", f.learnable_transitions}});
    j["modalities"] = json::array();
    for (const auto& mod : m.modalities)
        j["modalities"].push_back({{"name", mod.name},
                                   {"cardinality", mod.cardinality},
                                   {"learnable_likelihood", mod.learnable_likelihood}});
    j["A"] = json::array();
    for (const auto& a : m.A) j["A"].push_back(tensor_to_json(a.tensor()));
    j["B"] = json::array();
    for (const auto& b : m.B) j["B"].push_back(tensor_to_json(b.tensor()));
    j["c"] = m.c;
    j["d"] = json::array();
    for (const auto& prior : m.d) j["d"].push_back(prior.probs());
    auto shadows = [](const std::vector<std::optional<DirichletParams>>& v) {
        json arr = json::array();
        for (const auto& s : v) {
            if (s)
                arr.push_back(tensor_to_json(s->conc()));
            else
                arr.push_back(nullptr);
        }
        return arr;
    };
    j["dirichlet_a"] = shadows(m.dirichlet_a);
    j["dirichlet_b"] = shadows(m.dirichlet_b);
    j["dirichlet_d"] = shadows(m.dirichlet_d);
    j["control_map"] = m.control_map;
    return j.dump(2);
}

GenerativeModel deserialize(const std::string& document) {
    json j;
    try {
        j = json::parse(document);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("/: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("/: expected a JSON object");

    GenerativeModel m;
    const json& factors = require(j, "factors", "");
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const json& f = factors[i];
        const std::string path = "/factors/" + std::to_string(i);
        FactorSpec spec;
        try {
            spec.name = require(f, "name", path).get<std::string>();
            spec.cardinality = require(f, "cardinality", path).get<std::size_t>();
            spec.control_cardinality = require(f, "control_cardinality", path).get<std::size_t>();
            spec.learnable_transitions = require(f, "learnable_transitions", path).get<bool>();
        } catch (const json::exception&) {
            throw SchemaError(path + ": malformed factor spec");
        }
        m.factors.push_back(std::move(spec));
    }
    const json& modalities = require(j, "modalities", "");
    for (std::size_t i = 0; i < modalities.size(); ++i) {
        const json& mod = modalities[i];
        const std::string path = "/modalities/" + std::to_string(i);
        ModalitySpec spec;
        try {
            spec.name = require(mod, "name", path).get<std::string>();
            spec.cardinality = require(mod, "cardinality", path).get<std::size_t>();
            spec.learnable_likelihood = require(mod, "learnable_likelihood", path).get<bool>();
        } catch (const json::exception&) {
            throw SchemaError(path + ": malformed modality spec");
        }
        m.modalities.push_back(std::move(spec));
    }

    const json& a_arr = require(j, "A", "");
    for (std::size_t i = 0; i < a_arr.size(); ++i) {
        const std::string path = "/A/" + std::to_string(i);
        try {
            m.A.emplace_back(tensor_from_json(a_arr[i], path));
        } catch (const AdtError& e) {
            if (dynamic_cast<const SchemaError*>(&e)) throw;
            throw SchemaError(path + ": " + e.what());
        }
    }
    const json& b_arr = require(j, "B", "");
    for (std::size_t i = 0; i < b_arr.size(); ++i) {
        const std::string path = "/B/" + std::to_string(i);
        try {
            m.B.emplace_back(tensor_from_json(b_arr[i], path));
        } catch (const AdtError& e) {
            if (dynamic_cast<const SchemaError*>(&e)) throw;
            throw SchemaError(path + ": " + e.what());
        }
    }
    try {
        m.c = require(j, "c", "").get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
        throw SchemaError("/c: malformed preference vectors");
    }
    const json& d_arr = require(j, "d", "");
    for (std::size_t i = 0; i < d_arr.size(); ++i) {
        const std::string path = "/d/" + std::to_string(i);
        try {
            m.d.emplace_back(d_arr[i].get<std::vector<double>>());
        } catch (const json::exception&) {
            throw SchemaError(path + ": malformed prior");
        } catch (const AdtError& e) {
            throw SchemaError(path + ": " + e.what());
        }
    }

    auto read_shadows = [&j](const char* key) {
        std::vector<std::optional<DirichletParams>> out;
        const json& arr = require(j, key, "");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = std::string("/") + key + "/" + std::to_string(i);
            if (arr[i].is_null()) {
                out.emplace_back(std::nullopt);
                continue;
            }
            Tensor t = tensor_from_json(arr[i], path);
            for (std::size_t k = 0; k < t.size(); ++k)
                if (!(t[k] > 0.0))
                    throw SchemaError(path + "/data/" + std::to_string(k) +
                                      ": concentration must be positive");
            out.emplace_back(DirichletParams(std::move(t)));
        }
        return out;
    };
    m.dirichlet_a = read_shadows("dirichlet_a");
    m.dirichlet_b = read_shadows("dirichlet_b");
    m.dirichlet_d = read_shadows("dirichlet_d");

    try {
        m.control_map = require(j, "control_map", "").get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception&) {
        throw SchemaError("/control_map: malformed");
    }

    return m;
}

}  // namespace adt
