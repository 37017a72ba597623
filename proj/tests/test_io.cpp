#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shellhier/errors.hpp"
#include "shellhier/io.hpp"
#include "support.hpp"

namespace shellhier {
namespace {

using namespace testing;
using io::json;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Io, SurfaceDescriptorRoundTrip) {
  const json in = json::parse(R"J({"family": "spherical_cap", "params": {"polar_angle": 0.9, "chart": "polar"},
                                  "grid": [12, 20], "derivative_mode": "finite_difference"})J");
  const SurfaceDescriptor d = io::surface_from_json(in);
  const json explicit_form = io::to_json(d);
  EXPECT_EQ(explicit_form["params"]["radius"], 1.0);
  EXPECT_EQ(explicit_form["grid"], json::array({12, 20}));
  EXPECT_TRUE(explicit_form.contains("domain"));
  // The explicit form parses back to an identical explicit form.
  EXPECT_EQ(io::to_json(io::surface_from_json(explicit_form)), explicit_form);
  EXPECT_NO_THROW(SurfacePatch::build(io::surface_from_json(explicit_form)));
}

TEST(Io, RejectsUnknownKeysAndFamilies) {
  EXPECT_THROW(io::surface_from_json(json::parse(R"J({"family": "plate", "gird": 8})J")), Error);
  EXPECT_THROW(io::surface_from_json(json::parse(R"J({"family": "torus"})J")), Error);
  EXPECT_THROW(io::surface_from_json(json::parse(R"J({"family": "cylinder", "params": {"r": 1}})J")), Error);
  EXPECT_THROW(io::material_from_json(json::parse(R"J({"mu": -1})J")), Error);
  EXPECT_THROW(io::material_from_json(json::parse(R"J({"nu": 0.3})J")), Error);
}

TEST(Io, FieldForms) {
  const SurfacePatch s = plate(8);
  const VectorField a = io::field_from_json(s, json::parse(R"J(["u", "2*v", "sin(u)"])J"));
  EXPECT_NEAR(a.jet(0.5, 0.25).val.z(), std::sin(0.5), 1e-15);
  const VectorField r = io::field_from_json(s, json::parse(R"J({"rigid": {"rotation": [0, 0, 1]}})J"));
  EXPECT_LT((r.jet(0.5, 0.0).val - Vec3(0, 0.5, 0)).norm(), 1e-15);
  const VectorField id = io::field_from_json(s, "identity");
  EXPECT_LT((id.jet(0.3, 0.7).val - Vec3(0.3, 0.7, 0)).norm(), 1e-15);

  // Sampled fields round-trip through their nodal values.
  const VectorField sampled = VectorField::sampled(s, a.nodal_values());
  const VectorField back = io::field_from_json(s, io::to_json(sampled));
  EXPECT_EQ(back.nodal_values(), a.nodal_values());
  EXPECT_THROW(io::field_from_json(s, json::parse(R"J({"values": [[1, 2, 3]]})J")), Error);
  EXPECT_THROW(io::field_from_json(s, json::parse(R"J(["u", "v"])J")), Error);
  EXPECT_THROW(io::field_from_json(s, json::parse(R"J(["u", "v", "w"])J")), Error);
}

TEST(Io, StrainForms) {
  const SurfacePatch s = plate(8);
  const StrainField b = io::strain_from_json(s, json::parse(R"J(["u", "0.5", "v"])J"));
  EXPECT_NEAR(b.at(0.25, 0.75)(1, 1), 0.75, 1e-15);
  EXPECT_NEAR(b.at(0.25, 0.75)(0, 1), 0.5, 1e-15);
  EXPECT_EQ(io::strain_from_json(s, "zero").at(0.5, 0.5), Mat2::Zero());
}

TEST(Io, Numbers) {
  EXPECT_TRUE(io::number(std::nan("")).is_null());
  EXPECT_TRUE(io::number(INFINITY).is_null());
  EXPECT_EQ(io::number(0.5), json(0.5));
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Io, CsvAndPlotFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "shellhier_io_test";
  std::filesystem::create_directories(dir);
  io::write_csv(dir / "t.csv", {"h", "E_h"}, {{0.5, 1.0}, {0.25, 0.125}});
  EXPECT_EQ(slurp(dir / "t.csv"), "h,E_h\n0.5,1\n0.25,0.125\n");
  io::write_plot(dir / "t.dat", {1.0, 2.0}, {3.0, 4.5});
  EXPECT_EQ(slurp(dir / "t.dat"), "1 3\n2 4.5\n");
  EXPECT_THROW(io::write_text(dir / "missing" / "x.txt", "x"), Error);
  EXPECT_THROW(io::read_json(dir / "nope.json"), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace shellhier
