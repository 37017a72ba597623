#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace shellhier {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

/// Nodal samples of a vector field, one row per grid node.
using NodalVec = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

inline Mat2 sym(const Mat2& m) { return 0.5 * (m + m.transpose()); }
inline Mat3 sym(const Mat3& m) { return 0.5 * (m + m.transpose()); }

}  // namespace shellhier
