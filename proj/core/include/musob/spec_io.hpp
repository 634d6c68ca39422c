#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "musob/measure.hpp"

namespace musob {

/// Parses a measure spec document:
///
///   {"interval": {"lo", "hi"},
///    "segments": [{"lo", "hi", "coeff", "center", "power", "critical"?}],
///    "atoms": [{"position", "mass"}],
///    "cantor": [{"lo", "hi", "mass", "depth"}]}
///
/// Errors are ValidationError carrying the JSON path of the bad field. The
/// result is validated.
MeasureSpec parse_measure_spec(std::string_view text);

MeasureSpec load_measure_spec(const std::filesystem::path& path);

/// Serialises a spec in the same schema, numbers with 17 significant digits.
std::string dump_measure_spec(const MeasureSpec& spec);

}  // namespace musob
