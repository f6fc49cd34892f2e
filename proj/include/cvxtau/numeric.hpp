#pragma once

#include <limits>

namespace cvxtau {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace cvxtau
