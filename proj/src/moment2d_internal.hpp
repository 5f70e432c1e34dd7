#pragma once

#include <cstdint>
#include <vector>

#include "latcount/moment2d.hpp"

namespace latcount::detail {

std::vector<YInterval> segment_intervals_unchecked(std::int64_t n, double x, double y, double T, double c);
double segment_length_unchecked(std::int64_t n, double x, double y, double T, double c);

}  // namespace latcount::detail
