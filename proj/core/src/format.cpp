#include "musob/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace musob {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  // Normalise negative zero so identical results print identically.
  if (value == 0.0) value = 0.0;
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                 std::chars_format::general, 17);
  return std::string(buffer.data(), end);
}

std::string format_row(std::span<const double> values) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) row += ',';
    row += format_double(values[i]);
  }
  return row;
}

}  // namespace musob
