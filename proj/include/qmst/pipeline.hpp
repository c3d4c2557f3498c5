#pragma once

#include "qmst/config.hpp"
#include "qmst/panel.hpp"

#include <cstddef>
#include <string>

namespace qmst {

struct PipelineResult {
    std::string manifest_path;
    /// SHA-256 of the manifest bytes.
    std::string manifest_hash;
    std::size_t cells_ok = 0;
    std::size_t cells_failed = 0;
};

/// Loads the input named by `config`, applies returns and the transform
/// chain, and returns the analysis panel.
[[nodiscard]] SeriesPanel load_panel(const RunConfig& config);

/// Writes, for every (s, q): rho and distance matrices, the spanning tree,
/// its significance-filtered forest with metrics, DOT / GraphML renderings,
/// plus thresholds.csv and manifest.json. A failing cell is recorded in the
/// manifest and the remaining cells proceed.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace qmst
