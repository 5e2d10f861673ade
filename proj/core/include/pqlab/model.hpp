#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace pqlab {

/// One customer class. Classes are identified by position; index 1 is the
/// highest priority class.
struct ClassSpec {
    double arrival_rate = 0.0;      // lambda_i, customers per unit time
    double accumulation_rate = 1.0; // b_i, priority units per unit of waiting
};

struct SystemSpec {
    std::vector<ClassSpec> classes;
    double service_rate = 1.0;

    std::size_t class_count() const noexcept { return classes.size(); }

    /// Offered load: total arrival rate over service rate.
    double load() const noexcept;

    std::vector<double> arrival_rates() const;
    std::vector<double> accumulation_rates() const;

    /// Same classes with arrival rates replaced; sizes must match.
    SystemSpec with_arrival_rates(const std::vector<double>& rates) const;
};

namespace policy {

/// Lowest class index first.
struct Static {};

/// Accumulated priority b_i * (time waited), using the system's rates.
struct Accumulating {};

/// Accumulating with b_i = c_i / epsilon on the leading classes and b_i = c_i on
/// the last `static_tail_count` classes. When `base_rates` is shorter than the
/// class count, the missing tail rates are taken from the system.
struct ScaledAccumulating {
    double epsilon = 1.0;
    std::vector<double> base_rates;
    std::size_t static_tail_count = 1;
};

/// Classes 1..static_prefix always outrank the rest and are ordered statically;
/// the remaining classes compete by accumulated priority.
struct HybridLex {
    std::size_t static_prefix = 0;
};

} // namespace policy

using PolicySpec = std::variant<policy::Static, policy::Accumulating,
                                policy::ScaledAccumulating, policy::HybridLex>;

std::string policy_name(const PolicySpec& p);

/// Per-class accumulation rates the server actually uses under `p`. Static
/// returns the system's rates unchanged.
std::vector<double> effective_rates(const SystemSpec& system, const PolicySpec& p);

struct RatePhase {
    double start = 0.0;
    std::vector<double> arrival_rates;
};

struct PolicyPhase {
    double start = 0.0;
    PolicySpec policy;
};

/// A full experiment. Both schedules are right-continuous step functions. An
/// empty rate schedule means the class arrival rates hold for the whole run.
struct ScenarioSpec {
    SystemSpec system;
    std::vector<RatePhase> rate_schedule;
    std::vector<PolicyPhase> policy_schedule;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    double sample_interval = 1.0;

    /// Arrival rates in force at time t.
    std::vector<double> rates_at(double t) const;
    const PolicySpec& policy_at(double t) const;
};

/// Every violated invariant of the scenario, or an empty list when it is valid.
std::vector<std::string> validate(const ScenarioSpec& spec);

/// Structural checks on the system alone.
std::vector<std::string> validate(const SystemSpec& system);

} // namespace pqlab
