#pragma once

#include <string>

#include "weavesim/metrics.hpp"

namespace weave {

/// Density matrix as CSV; a comment line carries origin and bin size so the
/// file round-trips without outside context.
std::string density_csv(const DensityMap& map);
DensityMap density_from_csv(const std::string& csv);

/// Heat map, distance on x and elapsed time running down y; lighter cells
/// are denser. Deterministic byte output for identical inputs.
std::string density_svg(const DensityMap& map, double dt);

/// Time-space polylines for every vehicle in the control area, coloured by
/// speed (green fast, red slow).
std::string trajectories_svg(const EpisodeLog& log, const RoadNetwork& road);

/// Writes a file or throws DataError naming the path.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace weave
