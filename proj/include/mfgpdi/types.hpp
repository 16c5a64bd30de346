#pragma once

#include <Eigen/Core>

namespace mfgpdi {

using Vec2 = Eigen::Vector2d;
using Point = Eigen::Vector2d;
using Vector = Eigen::VectorXd;

} // namespace mfgpdi
