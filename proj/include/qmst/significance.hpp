#pragma once

#include "qmst/panel.hpp"
#include "qmst/rho.hpp"
#include "qmst/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qmst {

struct ThresholdEntry {
    std::size_t scale = 0;
    double q = 0.0;
    /// mean_max + 2 * sd_max
    double tau = 0.0;
    double mean_max = 0.0;
    double sd_max = 0.0;
    std::size_t n_sets = 0;
    std::uint64_t seed = 0;
};

class ThresholdTable {
public:
    ThresholdTable() = default;
    explicit ThresholdTable(std::vector<ThresholdEntry> entries);

    [[nodiscard]] const std::vector<ThresholdEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::optional<ThresholdEntry> find(std::size_t scale, double q) const;
    /// Throws ValidationError when (scale, q) is absent.
    [[nodiscard]] const ThresholdEntry& at(std::size_t scale, double q) const;

private:
    std::vector<ThresholdEntry> entries_;
};

struct MaximaSummary {
    double mean = 0.0;
    /// Sample (n - 1) standard deviation.
    double sd = 0.0;
    double tau = 0.0;
};

/// Mean + 2 sd of per-set maxima; needs at least two values.
[[nodiscard]] MaximaSummary summarize_maxima(std::span<const double> maxima);

/// Largest off-diagonal entry.
[[nodiscard]] double max_off_diagonal(const SymmetricMatrix& m);

/// For each of `n_sets` independently shuffled copies of `panel` (set k
/// seeded by derive_seed(seed, k)) records the maximum rho_q over all pairs,
/// then aggregates per (s, q) in set order.
[[nodiscard]] ThresholdTable surrogate_thresholds(const SeriesPanel& panel, std::span<const std::size_t> scales,
                                                  std::span<const double> q_values, std::size_t n_sets,
                                                  std::uint64_t seed, const RhoOptions& options = {});

/// Copy of `tree` with significant = (rho >= tau) on every edge, rho looked
/// up by label in `rho`.
[[nodiscard]] Tree mark_significance(const Tree& tree, const SymmetricMatrix& rho, double tau);

struct FilteredTree {
    /// Surviving nodes and edges only.
    Tree tree;
    /// Components as label lists, largest first.
    std::vector<std::vector<std::string>> components;
    std::size_t removed_nodes = 0;
    std::size_t removed_edges = 0;
};

/// Drops edges with rho < tau, then nodes left with degree zero.
[[nodiscard]] FilteredTree filter_tree(const Tree& tree, const SymmetricMatrix& rho, double tau);

[[nodiscard]] std::string thresholds_to_csv(const ThresholdTable& table);
void write_thresholds_csv(const std::string& path, const ThresholdTable& table);
[[nodiscard]] ThresholdTable read_thresholds_csv(const std::string& path);

}  // namespace qmst
