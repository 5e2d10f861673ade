#include "pqlab/scenario_io.hpp"

#include "pqlab/error.hpp"

#include <fstream>
#include <sstream>

namespace pqlab::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing required key");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<double> as_numbers(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
}

PolicySpec parse_policy(const json& obj, const std::string& path) {
    const json& kind_v = require(obj, "kind", path);
    if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
    const auto kind = kind_v.get<std::string>();
    if (kind == "static") {
        reject_unknown(obj, {"start", "kind"}, path);
        return policy::Static{};
    }
    if (kind == "accumulating") {
        reject_unknown(obj, {"start", "kind"}, path);
        return policy::Accumulating{};
    }
    if (kind == "scaled_accumulating") {
        reject_unknown(obj, {"start", "kind", "epsilon", "base_rates", "static_tail_count"}, path);
        policy::ScaledAccumulating p;
        p.epsilon = as_number(require(obj, "epsilon", path), path + ".epsilon");
        p.base_rates = as_numbers(require(obj, "base_rates", path), path + ".base_rates");
        if (auto it = obj.find("static_tail_count"); it != obj.end())
            p.static_tail_count = as_u64(*it, path + ".static_tail_count");
        return p;
    }
    if (kind == "hybrid_lex") {
        reject_unknown(obj, {"start", "kind", "static_prefix"}, path);
        policy::HybridLex p;
        p.static_prefix = as_u64(require(obj, "static_prefix", path), path + ".static_prefix");
        return p;
    }
    fail(path + ".kind", "unknown policy kind '" + kind + "'");
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

} // namespace

ScenarioSpec parse_scenario(const json& doc) {
    if (!doc.is_object()) fail("<root>", "expected an object");
    reject_unknown(doc, {"classes", "service_rate", "rate_schedule", "policy_schedule", "horizon",
                         "seed", "sample_interval"},
                   "");

    ScenarioSpec spec;
    const json& classes = require(doc, "classes", "");
    if (!classes.is_array()) fail("classes", "expected an array");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const std::string path = "classes[" + std::to_string(i) + "]";
        const json& c = classes[i];
        if (!c.is_object()) fail(path, "expected an object");
        reject_unknown(c, {"arrival_rate", "accumulation_rate"}, path);
        ClassSpec cls;
        cls.arrival_rate = as_number(require(c, "arrival_rate", path), path + ".arrival_rate");
        cls.accumulation_rate =
            as_number(require(c, "accumulation_rate", path), path + ".accumulation_rate");
        spec.system.classes.push_back(cls);
    }
    if (auto it = doc.find("service_rate"); it != doc.end())
        spec.system.service_rate = as_number(*it, "service_rate");

    if (auto it = doc.find("rate_schedule"); it != doc.end()) {
        if (!it->is_array()) fail("rate_schedule", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string path = "rate_schedule[" + std::to_string(k) + "]";
            const json& e = (*it)[k];
            if (!e.is_object()) fail(path, "expected an object");
            reject_unknown(e, {"start", "rates"}, path);
            RatePhase ph;
            ph.start = as_number(require(e, "start", path), path + ".start");
            ph.arrival_rates = as_numbers(require(e, "rates", path), path + ".rates");
            spec.rate_schedule.push_back(std::move(ph));
        }
    }

    const json& policies = require(doc, "policy_schedule", "");
    if (!policies.is_array()) fail("policy_schedule", "expected an array");
    for (std::size_t k = 0; k < policies.size(); ++k) {
        const std::string path = "policy_schedule[" + std::to_string(k) + "]";
        const json& e = policies[k];
        if (!e.is_object()) fail(path, "expected an object");
        PolicyPhase ph;
        ph.start = as_number(require(e, "start", path), path + ".start");
        ph.policy = parse_policy(e, path);
        spec.policy_schedule.push_back(std::move(ph));
    }

    spec.horizon = as_number(require(doc, "horizon", ""), "horizon");
    spec.seed = as_u64(require(doc, "seed", ""), "seed");
    spec.sample_interval = as_number(require(doc, "sample_interval", ""), "sample_interval");
    return spec;
}

ScenarioSpec parse_scenario_text(std::string_view text, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ValidationError(source_name + ":" + std::to_string(line) + ": malformed JSON: " +
                              e.what());
    }
    try {
        return parse_scenario(doc);
    } catch (const ValidationError& e) {
        throw ValidationError(source_name + ": " + e.what());
    }
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read scenario file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path.string());
}

json to_json(const PolicySpec& p) {
    struct Visitor {
        json operator()(const policy::Static&) const { return {{"kind", "static"}}; }
        json operator()(const policy::Accumulating&) const { return {{"kind", "accumulating"}}; }
        json operator()(const policy::ScaledAccumulating& s) const {
            return {{"kind", "scaled_accumulating"},
                    {"epsilon", s.epsilon},
                    {"base_rates", s.base_rates},
                    {"static_tail_count", s.static_tail_count}};
        }
        json operator()(const policy::HybridLex& h) const {
            return {{"kind", "hybrid_lex"}, {"static_prefix", h.static_prefix}};
        }
    };
    return std::visit(Visitor{}, p);
}

json to_json(const ScenarioSpec& spec) {
    json doc;
    json classes = json::array();
    for (const auto& c : spec.system.classes)
        classes.push_back({{"arrival_rate", c.arrival_rate}, {"accumulation_rate", c.accumulation_rate}});
    doc["classes"] = std::move(classes);
    doc["service_rate"] = spec.system.service_rate;
    if (!spec.rate_schedule.empty()) {
        json rs = json::array();
        for (const auto& ph : spec.rate_schedule) rs.push_back({{"start", ph.start}, {"rates", ph.arrival_rates}});
        doc["rate_schedule"] = std::move(rs);
    }
    json ps = json::array();
    for (const auto& ph : spec.policy_schedule) {
        json e = to_json(ph.policy);
        e["start"] = ph.start;
        ps.push_back(std::move(e));
    }
    doc["policy_schedule"] = std::move(ps);
    doc["horizon"] = spec.horizon;
    doc["seed"] = spec.seed;
    doc["sample_interval"] = spec.sample_interval;
    return doc;
}

} // namespace pqlab::io
