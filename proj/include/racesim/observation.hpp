#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "racesim/camera.hpp"
#include "racesim/dynamics.hpp"
#include "racesim/flightplan.hpp"
#include "racesim/reward.hpp"

namespace racesim {

/// What the policy sees at execution time. Carries no ground truth.
struct Observation {
  MaskImage mask;
  Vec3 rates = Vec3::Zero();         // measured body rates
  Vec4 motor_speeds = Vec4::Zero();  // measured propeller speeds
  FlightPlanVector flight_plan{};

  bool operator==(const Observation&) const = default;
};

/// Ground-truth training-time information, in the order
/// [p_w, p_g, v_w, v_g, (roll, pitch, yaw_w, yaw_g), rates, motors, extrinsics, d].
struct PrivilegedObservation {
  Vec3 p_w = Vec3::Zero();
  Vec3 p_g = Vec3::Zero();
  Vec3 v_w = Vec3::Zero();
  Vec3 v_g = Vec3::Zero();
  Vec4 attitude = Vec4::Zero();
  Vec3 rates = Vec3::Zero();
  Vec4 motor_speeds = Vec4::Zero();
  Vec3 extrinsics = Vec3::Zero();  // camera roll, pitch, yaw
  std::array<double, kParamCount> params{};

  static constexpr int kSize = 3 + 3 + 3 + 3 + 4 + 3 + 4 + 3 + kParamCount;
  std::array<double, kSize> to_array() const;
  static PrivilegedObservation from_array(const std::array<double, kSize>& a);

  bool operator==(const PrivilegedObservation&) const = default;
};

struct StepInfo {
  std::vector<GateCrossing> crossings;
  std::uint32_t laps = 0;
  std::int64_t step = 0;  // index of the step that produced this result
  std::int64_t flight_plan_index = 0;
  bool flight_plan_advanced = false;
  std::int64_t target_gate = 0;
  double specific_force = 0.0;   // |F| at the end of the step, m/s^2
  double specific_thrust = 0.0;  // k_w * sum(omega^2), m/s^2
  double speed = 0.0;            // |v_w|, m/s

  bool operator==(const StepInfo&) const = default;
};

/// Flat buffers for foreign-language bindings. Layout version 1:
///   mask: W*H bytes, row-major, 0/1
///   vec:  [rates(3), motor speeds(4), flight plan(24)]
///   priv: PrivilegedObservation::to_array() order, empty when absent
inline constexpr int kFlatLayoutVersion = 1;
inline constexpr int kFlatVectorSize = 3 + 4 + kFlightPlanSize;

struct FlatObservation {
  std::vector<std::uint8_t> mask;
  std::array<double, kFlatVectorSize> vec{};
  std::vector<double> priv;
};

FlatObservation flatten(const Observation& obs, const std::optional<PrivilegedObservation>& priv);

}  // namespace racesim
