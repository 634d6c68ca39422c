#include <gtest/gtest.h>

#include "corpus.hpp"
#include "musob/errors.hpp"
#include "musob/spec_io.hpp"

using namespace musob;

namespace {

std::string path_of(const std::string& text) {
  try {
    (void)parse_measure_spec(text);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(SpecIo, ParsesAllSections) {
  const auto s = parse_measure_spec(R"({
    "interval": {"lo": 0, "hi": 1},
    "segments": [{"lo": 0, "hi": 0.5, "coeff": 2, "center": 0, "power": 1, "critical": true}],
    "atoms": [{"position": 0.7, "mass": 0.25}],
    "cantor": [{"lo": 0.5, "hi": 1, "mass": 0.5, "depth": 3}]
  })");
  ASSERT_EQ(s.segments.size(), 1u);
  EXPECT_TRUE(s.segments[0].critical);
  EXPECT_EQ(s.segments[0].power, 1.0);
  ASSERT_EQ(s.atoms.size(), 1u);
  EXPECT_EQ(s.atoms[0].mass, 0.25);
  ASSERT_EQ(s.cantor_parts.size(), 1u);
  EXPECT_EQ(s.cantor_parts[0].depth, 3);
}

TEST(SpecIo, ErrorsCarryJsonPath) {
  EXPECT_EQ(path_of("{"), "$");
  EXPECT_EQ(path_of(R"({"segments": []})"), "$.interval");
  EXPECT_EQ(path_of(R"({"interval": {"lo": 0, "hi": 1}, "atoms": [{"position": 0.5, "mass": "x"}]})"),
            "$.atoms[0].mass");
  EXPECT_EQ(path_of(R"({"interval": {"lo": 0, "hi": 1}, "atoms": [{"position": 0.5, "mass": 1, "w": 2}]})"),
            "$.atoms[0].w");
  EXPECT_EQ(path_of(R"({"interval": {"lo": 0, "hi": 1},
                        "segments": [{"lo": 0, "hi": 1, "coeff": 1, "center": 0, "power": -2}]})"),
            "$.segments[0].power");
  EXPECT_EQ(path_of(R"({"interval": {"lo": 0, "hi": 1}, "cantor": [{"lo": 0, "hi": 1, "mass": 1, "depth": 1.5}]})"),
            "$.cantor[0].depth");
}

TEST(SpecIo, RoundTrip) {
  for (const auto& e : fixtures::corpus()) {
    EXPECT_EQ(parse_measure_spec(dump_measure_spec(e.spec)), e.spec) << e.name;
  }
}

TEST(SpecIo, BundledSpecsLoad) {
  for (const char* name : {"uniform", "atom", "lebesgue_atom", "linear", "uniform_shifted", "cantor", "fat_cantor"}) {
    EXPECT_NO_THROW((void)load_measure_spec(std::string(MUSOB_DATA_DIR) + "/" + name + ".json")) << name;
  }
  EXPECT_THROW((void)load_measure_spec("/nonexistent/spec.json"), ValidationError);
}
