#include "racesim/flightplan.hpp"

namespace racesim {

FlightPlanVector flight_plan_vector(const Track& track, long long index,
                                    DifferenceIndexing indexing) {
  FlightPlanVector f{};
  const long long first = indexing == DifferenceIndexing::formula ? index - 1 : index;
  int k = 0;
  for (long long j = first; j < first + 3; ++j) {
    const GateSpec& a = track.gate(j);
    const GateSpec& b = track.gate(j + 1);
    const Vec3 dp = b.position - a.position;
    f[k++] = dp.x();
    f[k++] = dp.y();
    f[k++] = dp.z();
    f[k++] = wrap_angle(b.yaw - a.yaw);
  }
  for (long long j = index; j < index + 3; ++j) {
    const GateSpec& g = track.gate(j);
    f[k++] = g.position.x();
    f[k++] = g.position.y();
    f[k++] = g.position.z();
    f[k++] = g.yaw;
  }
  return f;
}

FlightPlanState make_flight_plan(const Track& track, long long index,
                                 DifferenceIndexing indexing) {
  FlightPlanState s;
  s.index = index;
  s.f = flight_plan_vector(track, index, indexing);
  return s;
}

FlightPlanState update_index(double x_hat_g, const FlightPlanState& state, FlightPlanMode mode,
                             const TunnelProgress& tunnel, CounterRng& rng, const Track& track,
                             DifferenceIndexing indexing) {
  FlightPlanState next = state;
  bool advance = false;
  if (mode == FlightPlanMode::deploy) {
    advance = x_hat_g > kDeployPassThreshold;
  } else {
    if (tunnel.pre_gate_crossed && !next.pending_threshold) {
      next.pending_threshold = rng.uniform(-tunnel.half_thickness, tunnel.half_thickness);
    }
    advance = next.pending_threshold && x_hat_g > *next.pending_threshold;
  }
  if (advance) {
    next = make_flight_plan(track, state.index + 1, indexing);
  }
  return next;
}

}  // namespace racesim
