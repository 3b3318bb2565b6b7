#pragma once

#include <array>
#include <optional>

#include "racesim/randomize.hpp"
#include "racesim/track.hpp"

namespace racesim {

inline constexpr int kFlightPlanSize = 24;
inline constexpr double kDeployPassThreshold = -0.15;

using FlightPlanVector = std::array<double, kFlightPlanSize>;

enum class FlightPlanMode : unsigned char { deploy = 0, train = 1 };

/// Which gate pairs the three difference blocks use. `formula` pairs
/// (i-1, i), (i, i+1), (i+1, i+2); `ahead` pairs (i, i+1) .. (i+2, i+3).
enum class DifferenceIndexing : unsigned char { formula = 0, ahead = 1 };

/// Three (dp, dyaw) difference blocks followed by three absolute (p, yaw)
/// blocks for gates i..i+2. Depends only on the track and the index.
FlightPlanVector flight_plan_vector(const Track& track, long long index,
                                    DifferenceIndexing indexing = DifferenceIndexing::formula);

struct FlightPlanState {
  long long index = 0;  // unwrapped; the gate is track.gate(index)
  FlightPlanVector f{};
  /// Train mode: gate-frame x at which the index advances, drawn on pre-gate entry.
  std::optional<double> pending_threshold;
};

FlightPlanState make_flight_plan(const Track& track, long long index,
                                 DifferenceIndexing indexing = DifferenceIndexing::formula);

struct TunnelProgress {
  bool pre_gate_crossed = false;  // for the gate the flight plan currently targets
  double half_thickness = 0.4;
};

/// Advances the index at most once. Deploy mode fires when x_hat > -0.15 m;
/// train mode fires at a uniformly drawn point between pre- and post-gate.
FlightPlanState update_index(double x_hat_g, const FlightPlanState& state, FlightPlanMode mode,
                             const TunnelProgress& tunnel, CounterRng& rng, const Track& track,
                             DifferenceIndexing indexing = DifferenceIndexing::formula);

}  // namespace racesim
