#include "pqlab/model.hpp"

#include "pqlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pqlab {

ValidationError::ValidationError(const std::vector<std::string>& problems)
    : std::invalid_argument([&] {
          std::string joined;
          for (const auto& p : problems) {
              if (!joined.empty()) joined += "; ";
              joined += p;
          }
          return joined;
      }()),
      problems_(problems) {}

double SystemSpec::load() const noexcept {
    double total = 0.0;
    for (const auto& c : classes) total += c.arrival_rate;
    return total / service_rate;
}

std::vector<double> SystemSpec::arrival_rates() const {
    std::vector<double> out;
    out.reserve(classes.size());
    for (const auto& c : classes) out.push_back(c.arrival_rate);
    return out;
}

std::vector<double> SystemSpec::accumulation_rates() const {
    std::vector<double> out;
    out.reserve(classes.size());
    for (const auto& c : classes) out.push_back(c.accumulation_rate);
    return out;
}

SystemSpec SystemSpec::with_arrival_rates(const std::vector<double>& rates) const {
    if (rates.size() != classes.size())
        throw ValidationError("arrival rate vector has " + std::to_string(rates.size()) +
                              " entries, system has " + std::to_string(classes.size()) +
                              " classes");
    SystemSpec out = *this;
    for (std::size_t i = 0; i < rates.size(); ++i) out.classes[i].arrival_rate = rates[i];
    return out;
}

std::string policy_name(const PolicySpec& p) {
    struct Visitor {
        std::string operator()(const policy::Static&) const { return "static"; }
        std::string operator()(const policy::Accumulating&) const { return "accumulating"; }
        std::string operator()(const policy::ScaledAccumulating&) const {
            return "scaled_accumulating";
        }
        std::string operator()(const policy::HybridLex&) const { return "hybrid_lex"; }
    };
    return std::visit(Visitor{}, p);
}

std::vector<double> effective_rates(const SystemSpec& system, const PolicySpec& p) {
    std::vector<double> rates = system.accumulation_rates();
    if (const auto* scaled = std::get_if<policy::ScaledAccumulating>(&p)) {
        const std::size_t n = rates.size();
        const std::size_t tail = std::min(scaled->static_tail_count, n);
        for (std::size_t i = 0; i < n; ++i) {
            const double c = i < scaled->base_rates.size() ? scaled->base_rates[i] : rates[i];
            rates[i] = i < n - tail ? c / scaled->epsilon : c;
        }
    }
    return rates;
}

std::vector<double> ScenarioSpec::rates_at(double t) const {
    if (rate_schedule.empty()) return system.arrival_rates();
    auto it = std::upper_bound(rate_schedule.begin(), rate_schedule.end(), t,
                               [](double v, const RatePhase& ph) { return v < ph.start; });
    if (it == rate_schedule.begin()) return rate_schedule.front().arrival_rates;
    return std::prev(it)->arrival_rates;
}

const PolicySpec& ScenarioSpec::policy_at(double t) const {
    auto it = std::upper_bound(policy_schedule.begin(), policy_schedule.end(), t,
                               [](double v, const PolicyPhase& ph) { return v < ph.start; });
    if (it == policy_schedule.begin()) return policy_schedule.front().policy;
    return std::prev(it)->policy;
}

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

std::string at(const std::string& where, std::size_t i) {
    return where + "[" + std::to_string(i) + "]";
}

template <class Phase>
void check_schedule_times(const std::vector<Phase>& schedule, const std::string& name,
                          double horizon, std::vector<std::string>& errors) {
    if (schedule.empty()) return;
    if (schedule.front().start != 0.0) errors.push_back(name + ": schedule must start at time 0");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const double t = schedule[i].start;
        if (!std::isfinite(t) || t < 0.0 || t >= horizon)
            errors.push_back(at(name, i) + ".start: schedule time outside [0, horizon)");
        if (i > 0 && !(t > schedule[i - 1].start))
            errors.push_back(name + ": schedule times not strictly increasing");
    }
}

void check_policy(const PolicySpec& p, std::size_t n, const std::string& where,
                  std::vector<std::string>& errors) {
    if (const auto* s = std::get_if<policy::ScaledAccumulating>(&p)) {
        if (!finite_pos(s->epsilon)) errors.push_back(where + ".epsilon: must be positive");
        if (s->static_tail_count < 1 || s->static_tail_count > n)
            errors.push_back(where + ".static_tail_count: must be in [1, class count]");
        if (s->base_rates.size() > n)
            errors.push_back(where + ".base_rates: more entries than classes");
        if (s->base_rates.size() < n - std::min(s->static_tail_count, n))
            errors.push_back(where + ".base_rates: missing rates for scaled classes");
        for (std::size_t i = 0; i < s->base_rates.size(); ++i)
            if (!finite_pos(s->base_rates[i]))
                errors.push_back(at(where + ".base_rates", i) + ": must be positive");
    } else if (const auto* h = std::get_if<policy::HybridLex>(&p)) {
        if (h->static_prefix > n)
            errors.push_back(where + ".static_prefix: exceeds class count");
    }
}

} // namespace

std::vector<std::string> validate(const SystemSpec& system) {
    std::vector<std::string> errors;
    if (system.classes.empty()) errors.push_back("classes: at least one class required");
    if (!finite_pos(system.service_rate)) errors.push_back("service_rate: must be positive");
    for (std::size_t i = 0; i < system.classes.size(); ++i) {
        const auto& c = system.classes[i];
        if (!finite_nonneg(c.arrival_rate))
            errors.push_back(at("classes", i) + ".arrival_rate: must be non-negative");
        if (!finite_pos(c.accumulation_rate))
            errors.push_back(at("classes", i) + ".accumulation_rate: must be positive");
    }
    for (std::size_t i = 1; i < system.classes.size(); ++i) {
        if (!(system.classes[i].accumulation_rate < system.classes[i - 1].accumulation_rate)) {
            errors.push_back("accumulation rates not strictly decreasing");
            break;
        }
    }
    return errors;
}

std::vector<std::string> validate(const ScenarioSpec& spec) {
    std::vector<std::string> errors = validate(spec.system);
    const std::size_t n = spec.system.classes.size();

    if (!finite_pos(spec.horizon)) errors.push_back("horizon: must be positive");
    if (!finite_pos(spec.sample_interval)) errors.push_back("sample_interval: must be positive");

    for (std::size_t k = 0; k < spec.rate_schedule.size(); ++k) {
        const auto& rates = spec.rate_schedule[k].arrival_rates;
        if (rates.size() != n)
            errors.push_back(at("rate_schedule", k) + ".rates: expected " + std::to_string(n) +
                             " entries");
        for (std::size_t i = 0; i < rates.size(); ++i)
            if (!finite_nonneg(rates[i]))
                errors.push_back(at(at("rate_schedule", k) + ".rates", i) +
                                 ": must be non-negative");
    }
    check_schedule_times(spec.rate_schedule, "rate_schedule", spec.horizon, errors);

    if (spec.policy_schedule.empty())
        errors.push_back("policy_schedule: at least one policy phase required");
    for (std::size_t k = 0; k < spec.policy_schedule.size(); ++k)
        check_policy(spec.policy_schedule[k].policy, n, at("policy_schedule", k), errors);
    check_schedule_times(spec.policy_schedule, "policy_schedule", spec.horizon, errors);

    return errors;
}

} // namespace pqlab
