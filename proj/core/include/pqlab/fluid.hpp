#pragma once

#include "pqlab/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace pqlab::fluid {

/// Snapshot of the fluid model at a breakpoint.
struct FluidState {
    double time = 0.0;
    std::vector<double> levels;     // L_i
    std::vector<double> priorities; // P_i = b_i L_i / lambda_i (0 when lambda_i = 0)
    /// 1-based indices of the classes receiving excess capacity on the segment
    /// that starts here. Under AP these share the maximal priority.
    std::vector<std::size_t> active_set;
};

/// Piecewise-linear solution. slopes[k] holds dL_i/dt on the segment starting at
/// breakpoints[k]; the last slope row continues past the final breakpoint.
struct FluidTrajectory {
    std::vector<FluidState> breakpoints;
    std::vector<std::vector<double>> slopes;
    /// Asymptotic dL_i/dt once no further breakpoints occur.
    std::vector<double> terminal_growth_rates;

    std::vector<double> levels_at(double t) const;
};

/// Static priority fluid: capacity goes to the lowest-index non-empty class,
/// empty higher classes are held at zero by consuming their own inflow.
/// Requires service_rate = 1 and rho - lambda_i < 1 for every class.
FluidTrajectory sp_fluid_trajectory(const SystemSpec& system,
                                    const std::vector<double>& initial_levels, double horizon);

/// Accumulating priority fluid, solved exactly by events: the classes with the
/// maximal P share capacity so their priorities move together, and every other
/// class joins that set when its rising priority catches up. Requires all
/// lambda_i > 0 in addition to the SP preconditions.
FluidTrajectory ap_fluid_trajectory(const SystemSpec& system,
                                    const std::vector<double>& initial_levels, double horizon);

/// Closed-form AP growth once all priorities have coalesced:
/// (rho - 1) (lambda_i / b_i) / sum_j lambda_j / b_j. Requires rho > 1.
std::vector<double> ap_growth_rates(const SystemSpec& system);

/// CSV with columns time, L_1..L_n, P_1..P_n, active_set: one row per breakpoint
/// merged with samples every `sample_interval` up to the final breakpoint.
void write_csv(std::ostream& out, const FluidTrajectory& trajectory,
               const SystemSpec& system, double sample_interval);

} // namespace pqlab::fluid
