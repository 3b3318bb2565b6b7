#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace racesim {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Rotation Rz(yaw) * Ry(pitch) * Rx(roll), i.e. yaw applied first.
Mat3 rotation_from_euler(double roll, double pitch, double yaw);
Quat quat_from_euler(double roll, double pitch, double yaw);

/// (roll, pitch, yaw) of a body->world rotation in yaw-pitch-roll order.
Vec3 euler_from_quat(const Quat& q);

Mat3 yaw_rotation(double yaw);

}  // namespace racesim
