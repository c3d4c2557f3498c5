#pragma once

#include "qmst/panel.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qmst {

/// Dense symmetric N x N matrix with node labels.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    SymmetricMatrix(std::vector<std::string> labels, double diagonal);
    /// Row-major N x N values; throws ValidationError unless symmetric.
    SymmetricMatrix(std::vector<std::string> labels, std::vector<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
    /// Sets both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double v) {
        values_[i * size() + j] = v;
        values_[j * size() + i] = v;
    }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<std::string> labels_;
    std::vector<double> values_;
};

/// rho_q(s) for every pair; unit diagonal.
struct RhoMatrix : SymmetricMatrix {
    std::size_t scale = 0;
    double q = 2.0;
    unsigned order = 2;
};

/// sqrt(2 (1 - rho)) for every pair; zero diagonal.
struct DistanceMatrix : SymmetricMatrix {
    std::size_t scale = 0;
    double q = 2.0;
};

struct RhoOptions {
    unsigned order = 2;
    /// Permit q < 0 and fold |rho| > 1 back through rho -> 1/rho.
    bool audit_mode = false;
    /// Reuse per-series F_zz; off recomputes them inside every pair.
    bool use_cache = true;
    /// 0 selects the hardware concurrency.
    unsigned threads = 0;
};

/// Overshoot beyond |rho| = 1 that is treated as rounding and clamped.
inline constexpr double kRhoClampTolerance = 1e-12;

/// rho from the three fluctuation functions, with the clamp / reciprocal
/// policy applied. Throws ComputationError for non-positive denominators or
/// for |rho| > 1 + kRhoClampTolerance when q >= 0.
[[nodiscard]] double combine_rho(double f_xy, double f_xx, double f_yy, double q, bool audit_mode);

[[nodiscard]] double rho_q(std::span<const double> x, std::span<const double> y, std::size_t scale, double q,
                           unsigned order = 2, bool audit_mode = false);

[[nodiscard]] RhoMatrix rho_matrix(const SeriesPanel& panel, std::size_t scale, double q,
                                   const RhoOptions& options = {});

/// One matrix per q at a single scale; residuals and box moments are
/// computed once and shared across q.
[[nodiscard]] std::vector<RhoMatrix> rho_matrices(const SeriesPanel& panel, std::size_t scale,
                                                  std::span<const double> q_values, const RhoOptions& options = {});

[[nodiscard]] DistanceMatrix to_distance(const RhoMatrix& rho);

/// d = sqrt(2 (1 - c)) for an arbitrary correlation matrix with unit diagonal.
[[nodiscard]] DistanceMatrix correlation_distance(const SymmetricMatrix& correlation);

struct TriangleAuditReport {
    std::size_t triples_checked = 0;
    std::size_t violations = 0;
    /// Most negative d_xy + d_yz - d_xz over all orientations (positive when
    /// the matrix is metric on every triple).
    double worst_slack = 0.0;
};

/// Slack below -tolerance counts as a violation.
[[nodiscard]] TriangleAuditReport triangle_audit(const SymmetricMatrix& distances, double tolerance = 1e-12);

/// CSV with a header row and first column of labels, 12 significant digits.
[[nodiscard]] std::string matrix_to_csv(const SymmetricMatrix& m, const std::string& corner);
void write_matrix_csv(const std::string& path, const SymmetricMatrix& m, const std::string& corner);
[[nodiscard]] SymmetricMatrix read_matrix_csv(const std::string& path);

}  // namespace qmst
