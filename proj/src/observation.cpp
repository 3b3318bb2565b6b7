#include "racesim/observation.hpp"

#include <algorithm>

namespace racesim {

std::array<double, PrivilegedObservation::kSize> PrivilegedObservation::to_array() const {
  std::array<double, kSize> a{};
  auto it = a.begin();
  auto put = [&](const auto& v) {
    for (int i = 0; i < v.size(); ++i) *it++ = v[i];
  };
  put(p_w);
  put(p_g);
  put(v_w);
  put(v_g);
  put(attitude);
  put(rates);
  put(motor_speeds);
  put(extrinsics);
  it = std::copy(params.begin(), params.end(), it);
  return a;
}

PrivilegedObservation PrivilegedObservation::from_array(const std::array<double, kSize>& a) {
  PrivilegedObservation p;
  auto it = a.begin();
  auto get = [&](auto& v) {
    for (int i = 0; i < v.size(); ++i) v[i] = *it++;
  };
  get(p.p_w);
  get(p.p_g);
  get(p.v_w);
  get(p.v_g);
  get(p.attitude);
  get(p.rates);
  get(p.motor_speeds);
  get(p.extrinsics);
  std::copy(it, it + kParamCount, p.params.begin());
  return p;
}

FlatObservation flatten(const Observation& obs, const std::optional<PrivilegedObservation>& priv) {
  FlatObservation flat;
  flat.mask = obs.mask.pixels();
  auto it = flat.vec.begin();
  for (int i = 0; i < 3; ++i) *it++ = obs.rates[i];
  for (int i = 0; i < 4; ++i) *it++ = obs.motor_speeds[i];
  std::copy(obs.flight_plan.begin(), obs.flight_plan.end(), it);
  if (priv) {
    const auto a = priv->to_array();
    flat.priv.assign(a.begin(), a.end());
  }
  return flat;
}

}  // namespace racesim
