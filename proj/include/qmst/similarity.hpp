#pragma once

#include "qmst/panel.hpp"
#include "qmst/rho.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qmst {

/// Product-moment correlation of dt-aggregated returns; unit diagonal.
struct PearsonMatrix : SymmetricMatrix {
    std::size_t dt = 1;
};

[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// `returns` holds 1-step returns; they are summed over non-overlapping
/// blocks of dt before correlating.
[[nodiscard]] PearsonMatrix pearson_matrix(const SeriesPanel& returns, std::size_t dt);

/// Upper triangle in row order: (0,1), (0,2), ..., (0,N-1), (1,2), ...
[[nodiscard]] std::vector<double> vectorize_upper(const SymmetricMatrix& m);

/// Normalized scalar product sum a_m b_m / (|a| |b|).
[[nodiscard]] double scalar_product(std::span<const double> a, std::span<const double> b);

struct SimilarityEntry {
    std::size_t dt = 1;
    std::size_t scale = 0;
    double q = 0.0;
    double p = 0.0;
};

struct SimilarityReport {
    std::vector<SimilarityEntry> entries;
    std::size_t vector_length = 0;
};

/// P(dt, s, q) over the full grid. rho_q always uses the 1-step series.
[[nodiscard]] SimilarityReport similarity_grid(const SeriesPanel& returns, std::span<const std::size_t> dts,
                                               std::span<const std::size_t> scales, std::span<const double> q_values,
                                               const RhoOptions& options = {});

/// Rows dt x s, one column per q.
[[nodiscard]] std::string similarity_to_csv(const SimilarityReport& report);

}  // namespace qmst
