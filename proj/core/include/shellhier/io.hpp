#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shellhier/experiments.hpp"
#include "shellhier/field.hpp"
#include "shellhier/functionals.hpp"
#include "shellhier/geometry.hpp"
#include "shellhier/kinematics.hpp"
#include "shellhier/material.hpp"

namespace shellhier::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Parsing throws BadConfig with the offending key in the message.

SurfaceDescriptor surface_from_json(const json& j);
/// Fully explicit descriptor (every default materialized, domain resolved).
json to_json(const SurfaceDescriptor& d);

Material material_from_json(const json& j);
json to_json(const Material& m);

/// Accepted forms: "identity", "zero", [ex, ey, ez] (expression strings),
/// {"expr": [...]}, {"values": [[x, y, z], ...]}, {"rigid": {"translation": [...], "rotation": [...]}}.
VectorField field_from_json(const SurfacePatch& surface, const json& j);
json to_json(const VectorField& f);

/// Accepted forms: "zero", [b11, b12, b22] expressions, {"expr": [...]}, {"sym_gradient": <field>}.
StrainField strain_from_json(const SurfacePatch& surface, const json& j);

DisplacementHierarchy hierarchy_from_json(const SurfacePatch& surface, const json& j);

json to_json(const EnergyRecord& r);
json to_json(const ConjectureRecord& r);
json to_json(const ScalingReport& r);
json to_json(const EquipartitionReport& r);
json to_json(const MatchingResult& r);
json to_json(const IsometryOrderReport& r);
json to_json(const EllipticityReport& r);
json to_json(const PlateSecondOrderCheck& r);
json to_json(const ScalingOrder& r);

/// Finite doubles as numbers, NaN and infinities as null.
json number(double x);

/// Seventeen significant digits ("%.17g"), enough to round-trip.
std::string format_double(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);
/// Comma-separated, header row first.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
/// Two-column whitespace-separated plot data.
void write_plot(const std::filesystem::path& path, const std::vector<double>& x, const std::vector<double>& y);

json read_json(const std::filesystem::path& path);

}  // namespace shellhier::io
