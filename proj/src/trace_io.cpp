#include "adt/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adt/errors.hpp"

namespace adt::harness {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

constexpr std::size_t kFixedColumns = 11;

}  // namespace

std::string trace_to_rows(const TwinTrace& trace) {
    std::ostringstream out;
    out << "step,y,delta,restricted,obs_class,obs_action,vfe,action,ref_action,delta_g,"
           "epistemic_mass";
    for (std::size_t f = 0; f < trace.factor_names.size(); ++f)
        for (const auto& label : trace.state_labels[f])
            out << ",d_" << trace.factor_names[f] << "_" << label;
    out << "\n";

    for (const auto& s : trace.steps) {
        out << s.step << "," << s.truth.y << "," << fmt_double(s.truth.delta) << ","
            << (s.truth.restricted ? 1 : 0) << ",";
        out << (s.obs.observed.size() > 0 && s.obs.observed[0]
                    ? std::to_string(*s.obs.observed[0])
                    : std::string())
            << ",";
        out << (s.obs.observed.size() > 1 && s.obs.observed[1]
                    ? std::to_string(*s.obs.observed[1])
                    : std::string())
            << ",";
        out << fmt_double(s.vfe) << "," << s.executed_action << "," << s.reference_action << ","
            << fmt_double(s.delta_g) << "," << fmt_double(s.epistemic_mass);
        for (const auto& factor : s.posterior.factors)
            for (double p : factor.probs()) out << "," << fmt_double(p);
        out << "\n";
    }
    return out.str();
}

TwinTrace trace_from_rows(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("rows trace is empty");
    const std::vector<std::string> header = split(line, ',');
    if (header.size() < kFixedColumns) throw IoError("rows trace header is too short");

    TwinTrace trace;
    // Belief headers look like d_<factor>_<label>; the factor name is the
    // token up to the first underscore after the prefix.
    std::vector<std::size_t> factor_sizes;
    for (std::size_t c = kFixedColumns; c < header.size(); ++c) {
        const std::string& h = header[c];
        if (h.rfind("d_", 0) != 0) throw IoError("unexpected belief column header: " + h);
        const std::size_t us = h.find('_', 2);
        if (us == std::string::npos) throw IoError("unexpected belief column header: " + h);
        const std::string factor = h.substr(2, us - 2);
        const std::string label = h.substr(us + 1);
        if (trace.factor_names.empty() || trace.factor_names.back() != factor) {
            trace.factor_names.push_back(factor);
            trace.state_labels.emplace_back();
            factor_sizes.push_back(0);
        }
        trace.state_labels.back().push_back(label);
        ++factor_sizes.back();
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != header.size()) throw IoError("row width does not match header");
        StepRecord rec;
        rec.step = std::stoul(fields[0]);
        rec.truth.y = std::stoi(fields[1]);
        rec.truth.delta = std::stod(fields[2]);
        rec.truth.restricted = fields[3] == "1";
        rec.obs.observed.resize(2);
        if (!fields[4].empty()) rec.obs.observed[0] = std::stoul(fields[4]);
        if (!fields[5].empty()) rec.obs.observed[1] = std::stoul(fields[5]);
        rec.vfe = std::stod(fields[6]);
        rec.executed_action = std::stoul(fields[7]);
        rec.reference_action = std::stoul(fields[8]);
        rec.delta_g = std::stod(fields[9]);
        rec.epistemic_mass = std::stod(fields[10]);

        std::size_t c = kFixedColumns;
        for (std::size_t f = 0; f < factor_sizes.size(); ++f) {
            std::vector<double> probs(factor_sizes[f]);
            for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::stod(fields[c++]);
            rec.posterior.factors.emplace_back(std::move(probs));
        }
        trace.steps.push_back(std::move(rec));
    }
    return trace;
}

namespace {

json categorical_to_json(const Categorical& c) { return json(c.probs()); }

json belief_to_json(const Belief& b) {
    json arr = json::array();
    for (const auto& f : b.factors) arr.push_back(categorical_to_json(f));
    return arr;
}

Belief belief_from_json(const json& j) {
    Belief b;
    for (const auto& f : j) b.factors.emplace_back(f.get<std::vector<double>>());
    return b;
}

}  // namespace

std::string trace_to_document(const TwinTrace& trace) {
    json j;
    j["seed"] = trace.seed;
    j["mode"] = trace.mode;
    j["failed"] = trace.failed;
    if (trace.failure_step)
        j["failure_step"] = *trace.failure_step;
    else
        j["failure_step"] = nullptr;
    j["factor_names"] = trace.factor_names;
    j["state_labels"] = trace.state_labels;
    j["steps"] = json::array();
    for (const auto& s : trace.steps) {
        json js;
        js["step"] = s.step;
        js["truth"] = {{"y", s.truth.y},
                       {"delta", s.truth.delta},
                       {"restricted", s.truth.restricted}};
        json obs = json::array();
        for (const auto& o : s.obs.observed) {
            if (o)
                obs.push_back(*o);
            else
                obs.push_back(nullptr);
        }
        js["obs"] = obs;
        js["posterior"] = belief_to_json(s.posterior);
        js["vfe"] = s.vfe;
        json tp = json::array();
        for (const auto& p : s.top_policies)
            tp.push_back({{"index", p.index}, {"actions", p.actions}, {"g", p.g}});
        js["top_policies"] = tp;
        js["full_g"] = s.full_g;
        js["action_set"] = s.action_set;
        js["action_posterior"] = categorical_to_json(s.action_posterior);
        js["action"] = s.executed_action;
        js["ref_action"] = s.reference_action;
        js["delta_g"] = s.delta_g;
        js["epistemic_mass"] = s.epistemic_mass;
        j["steps"].push_back(std::move(js));
    }
    return j.dump(2);
}

TwinTrace trace_from_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("trace document is not valid JSON: ") + e.what());
    }
    TwinTrace trace;
    try {
        trace.seed = j.at("seed").get<std::uint64_t>();
        trace.mode = j.at("mode").get<std::string>();
        trace.failed = j.at("failed").get<bool>();
        if (!j.at("failure_step").is_null())
            trace.failure_step = j.at("failure_step").get<std::size_t>();
        trace.factor_names = j.at("factor_names").get<std::vector<std::string>>();
        trace.state_labels = j.at("state_labels").get<std::vector<std::vector<std::string>>>();
        for (const auto& js : j.at("steps")) {
            StepRecord rec;
            rec.step = js.at("step").get<std::size_t>();
            rec.truth.y = js.at("truth").at("y").get<int>();
            rec.truth.delta = js.at("truth").at("delta").get<double>();
            rec.truth.restricted = js.at("truth").at("restricted").get<bool>();
            for (const auto& o : js.at("obs")) {
                if (o.is_null())
                    rec.obs.observed.emplace_back(std::nullopt);
                else
                    rec.obs.observed.emplace_back(o.get<std::size_t>());
            }
            rec.posterior = belief_from_json(js.at("posterior"));
            rec.vfe = js.at("vfe").get<double>();
            for (const auto& p : js.at("top_policies")) {
                PolicySummary ps;
                ps.index = p.at("index").get<std::size_t>();
                ps.actions = p.at("actions").get<Policy>();
                ps.g = p.at("g").get<double>();
                rec.top_policies.push_back(std::move(ps));
            }
            rec.full_g = js.at("full_g").get<std::vector<double>>();
            rec.action_set = js.at("action_set").get<std::vector<std::size_t>>();
            rec.action_posterior = Categorical(js.at("action_posterior").get<std::vector<double>>());
            rec.executed_action = js.at("action").get<std::size_t>();
            rec.reference_action = js.at("ref_action").get<std::size_t>();
            rec.delta_g = js.at("delta_g").get<double>();
            rec.epistemic_mass = js.at("epistemic_mass").get<double>();
            trace.steps.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("trace document is malformed: ") + e.what());
    }
    return trace;
}

std::string report_to_json(const ClusterReport& report) {
    json j;
    j["n_episodes"] = report.n_episodes;
    j["failures"] = report.failures;
    j["failure_steps"] = report.failure_steps;
    j["re_counts"] = report.re_counts;
    j["ma_steps"] = report.ma_steps;
    auto delays = [](const std::vector<std::optional<std::size_t>>& v) {
        json arr = json::array();
        for (const auto& d : v) {
            if (d)
                arr.push_back(*d);
            else
                arr.push_back(nullptr);
        }
        return arr;
    };
    j["ma_delays"] = delays(report.ma_delays);
    j["ro_delays"] = delays(report.ro_delays);
    j["mean_finite_delay"] = report.mean_finite_delay;
    j["max_finite_delay"] = report.max_finite_delay;
    j["unmatched_delays"] = report.unmatched_delays;
    j["mean_delta_g"] = report.mean_delta_g;
    j["wall_ms_per_step"] = report.wall_ms_per_step;
    j["seed_base"] = report.seed_base;
    j["mode"] = report.mode;
    return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace adt::harness
