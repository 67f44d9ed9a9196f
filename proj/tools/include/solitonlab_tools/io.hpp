#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "solitonlab/halfline_spectral.hpp"
#include "solitonlab/nls_linearized.hpp"
#include "solitonlab/resolvent.hpp"
#include "solitonlab/solitons.hpp"
#include "solitonlab/wave_dynamics.hpp"
#include "solitonlab_tools/config.hpp"

namespace solitonlab {

using json = nlohmann::ordered_json;

void to_json(json& j, const RadialGrid& grid);
void to_json(json& j, const ZeroEnergyDiagnosis& d);
void to_json(json& j, const BirmanSchwingerResult& r);
void to_json(json& j, const GapChannel& c);
void to_json(json& j, const GapReport& r);
void to_json(json& j, const SigmaStarResult& r);
void to_json(json& j, const InstabilityCriterion& c);
void to_json(json& j, const ZeroModeClassification& c);
void to_json(json& j, const StableManifoldResult& r);
void to_json(json& j, const StabilityValue& v);

namespace tools {

void to_json(json& j, const RunConfig& config);

struct CsvColumn {
  std::string name;
  const std::vector<double>* values;
};

/// Header row plus one row per index, shortest round-trip decimal form,
/// independent of the global locale.
void write_csv(const std::filesystem::path& path, const std::vector<CsvColumn>& columns);

void write_json(const std::filesystem::path& path, const json& value);

/// Config echo, library versions and grid provenance next to the results.
json make_manifest(const RunConfig& config, const json& grids, const std::vector<std::string>& outputs);

std::string format_double(double x);

}  // namespace tools
}  // namespace solitonlab
