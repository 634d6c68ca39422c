#include "musob/spec_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "musob/errors.hpp"
#include "musob/format.hpp"

namespace musob {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known) throw ValidationError(path + "." + it.key(), "unknown field");
  }
}

const json& require_object(const json& parent, const char* key, const std::string& path) {
  const std::string here = path + "." + key;
  if (!parent.contains(key)) throw ValidationError(here, "missing required field");
  const json& v = parent.at(key);
  if (!v.is_object()) throw ValidationError(here, "must be an object");
  return v;
}

double number(const json& obj, const char* key, const std::string& path) {
  const std::string here = path + "." + key;
  if (!obj.contains(key)) throw ValidationError(here, "missing required field");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(here, "must be a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, const std::string& path) {
  const std::string here = path + "." + key;
  if (!obj.contains(key)) throw ValidationError(here, "missing required field");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(here, "must be an integer");
  return v.get<int>();
}

template <class F>
void for_each_item(const json& root, const char* key, F&& item) {
  if (!root.contains(key)) return;
  const json& arr = root.at(key);
  const std::string path = std::string("$.") + key;
  if (!arr.is_array()) throw ValidationError(path, "must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string here = path + "[" + std::to_string(i) + "]";
    if (!arr[i].is_object()) throw ValidationError(here, "must be an object");
    item(arr[i], here);
  }
}

}  // namespace

MeasureSpec parse_measure_spec(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("$", "document must be an object");
  reject_unknown(root, "$", {"interval", "segments", "atoms", "cantor"});

  MeasureSpec spec;
  const json& iv = require_object(root, "interval", "$");
  reject_unknown(iv, "$.interval", {"lo", "hi"});
  spec.interval = {number(iv, "lo", "$.interval"), number(iv, "hi", "$.interval")};

  for_each_item(root, "segments", [&](const json& s, const std::string& path) {
    reject_unknown(s, path, {"lo", "hi", "coeff", "center", "power", "critical"});
    DensitySegment seg{number(s, "lo", path),     number(s, "hi", path),
                       number(s, "coeff", path),  number(s, "center", path),
                       number(s, "power", path),  false};
    if (s.contains("critical")) {
      if (!s.at("critical").is_boolean()) {
        throw ValidationError(path + ".critical", "must be a boolean");
      }
      seg.critical = s.at("critical").get<bool>();
    }
    spec.segments.push_back(seg);
  });
  for_each_item(root, "atoms", [&](const json& a, const std::string& path) {
    reject_unknown(a, path, {"position", "mass"});
    spec.atoms.push_back({number(a, "position", path), number(a, "mass", path)});
  });
  for_each_item(root, "cantor", [&](const json& c, const std::string& path) {
    reject_unknown(c, path, {"lo", "hi", "mass", "depth"});
    spec.cantor_parts.push_back(
        {number(c, "lo", path), number(c, "hi", path), number(c, "mass", path), integer(c, "depth", path)});
  });

  validate(spec);
  return spec;
}

MeasureSpec load_measure_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("$", "cannot open spec file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_measure_spec(buffer.str());
}

std::string dump_measure_spec(const MeasureSpec& spec) {
  auto num = [](double v) { return format_double(v); };
  std::ostringstream out;
  out << "{\n  \"interval\": {\"lo\": " << num(spec.interval.lo) << ", \"hi\": "
      << num(spec.interval.hi) << "},\n  \"segments\": [";
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& s = spec.segments[i];
    out << (i ? ",\n    " : "\n    ") << "{\"lo\": " << num(s.lo) << ", \"hi\": " << num(s.hi)
        << ", \"coeff\": " << num(s.coeff) << ", \"center\": " << num(s.center)
        << ", \"power\": " << num(s.power);
    if (s.critical) out << ", \"critical\": true";
    out << "}";
  }
  out << (spec.segments.empty() ? "" : "\n  ") << "],\n  \"atoms\": [";
  for (std::size_t i = 0; i < spec.atoms.size(); ++i) {
    out << (i ? ", " : "") << "{\"position\": " << num(spec.atoms[i].position)
        << ", \"mass\": " << num(spec.atoms[i].mass) << "}";
  }
  out << "],\n  \"cantor\": [";
  for (std::size_t i = 0; i < spec.cantor_parts.size(); ++i) {
    const auto& c = spec.cantor_parts[i];
    out << (i ? ", " : "") << "{\"lo\": " << num(c.lo) << ", \"hi\": " << num(c.hi)
        << ", \"mass\": " << num(c.mass) << ", \"depth\": " << c.depth << "}";
  }
  out << "]\n}\n";
  return out.str();
}

}  // namespace musob
