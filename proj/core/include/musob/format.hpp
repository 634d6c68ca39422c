#pragma once

#include <span>
#include <string>

namespace musob {

/// Shortest-independent decimal rendering with 17 significant digits, so
/// that every written number round-trips and golden files stay stable.
std::string format_double(double value);

/// Joins values with commas using format_double.
std::string format_row(std::span<const double> values);

}  // namespace musob
