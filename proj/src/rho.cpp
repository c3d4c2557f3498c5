#include "qmst/rho.hpp"

#include "qmst/csv.hpp"
#include "qmst/error.hpp"
#include "qmst/fluct.hpp"
#include "qmst/parallel.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace qmst {

namespace {

// Residual variance at rounding level relative to the series amplitude
// means the profile is itself a polynomial of order <= m (e.g. a constant
// series): the denominator of rho would be numerical dust.
void require_fluctuating(const BoxResiduals& residuals, std::span<const double> series, const std::string& name) {
    const auto var = residuals.variances();
    double top = 0.0;
    for (const double v : var) top = std::max(top, v);
    double ms = 0.0;
    for (const double x : series) ms += x * x;
    ms /= static_cast<double>(series.size());
    const double floor = 1e-10 * static_cast<double>(residuals.scale());
    if (!(top > floor * floor * ms)) {
        throw ComputationError("series '" + name + "' has zero detrended fluctuation at s=" +
                               std::to_string(residuals.scale()));
    }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(std::vector<std::string> labels, double diagonal)
    : labels_(std::move(labels)), values_(labels_.size() * labels_.size(), 0.0) {
    for (std::size_t i = 0; i < size(); ++i) values_[i * size() + i] = diagonal;
}

SymmetricMatrix::SymmetricMatrix(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
    require_unique_labels(labels_);
    if (values_.size() != size() * size()) throw ValidationError("matrix value count does not match labels");
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) {
            if ((*this)(i, j) != (*this)(j, i)) {
                throw ValidationError("matrix is not symmetric at (" + labels_[i] + ", " + labels_[j] + ")");
            }
        }
    }
}

double combine_rho(double f_xy, double f_xx, double f_yy, double q, bool audit_mode) {
    if (!(f_xx > 0.0) || !(f_yy > 0.0)) throw ComputationError("zero detrended fluctuation in denominator");
    double denom = std::sqrt(f_xx * f_yy);
    if (!(denom > std::numeric_limits<double>::min()) || !std::isfinite(denom)) {
        denom = std::sqrt(f_xx) * std::sqrt(f_yy);
    }
    double rho = f_xy / denom;
    if (std::abs(rho) <= 1.0) return rho;
    if (q < 0.0) {
        if (!audit_mode) throw ValidationError("negative q is only supported by the triangle audit");
        return 1.0 / rho;
    }
    if (std::abs(rho) <= 1.0 + kRhoClampTolerance) return rho > 0.0 ? 1.0 : -1.0;
    throw ComputationError("rho = " + csv::format_sig(rho, 17) + " outside [-1, 1] at q = " + csv::format_sig(q, 6));
}

double rho_q(std::span<const double> x, std::span<const double> y, std::size_t scale, double q, unsigned order,
             bool audit_mode) {
    require_supported_q(q);
    if (q < 0.0 && !audit_mode) throw ValidationError("negative q is only supported by the triangle audit");
    if (x.size() != y.size()) throw ValidationError("series lengths differ");
    const auto boxes = partition(x.size(), scale);
    const PolynomialDetrender detrender(scale, order);
    require_fluctuating(BoxResiduals(x, boxes, detrender), x, "x");
    require_fluctuating(BoxResiduals(y, boxes, detrender), y, "y");
    const auto f = fluctuation(x, y, scale, q, order);
    if (!(f.f_xx > 0.0)) throw ComputationError("first series has zero detrended fluctuation");
    if (!(f.f_yy > 0.0)) throw ComputationError("second series has zero detrended fluctuation");
    return combine_rho(f.f_xy, f.f_xx, f.f_yy, q, audit_mode);
}

RhoMatrix rho_matrix(const SeriesPanel& panel, std::size_t scale, double q, const RhoOptions& options) {
    const double qs[] = {q};
    return std::move(rho_matrices(panel, scale, qs, options).front());
}

std::vector<RhoMatrix> rho_matrices(const SeriesPanel& panel, std::size_t scale, std::span<const double> q_values,
                                    const RhoOptions& options) {
    const std::size_t n = panel.size();
    if (n < 2) throw ValidationError("a correlation matrix needs at least two series");
    if (q_values.empty()) throw ValidationError("no q values requested");
    for (const double q : q_values) {
        require_supported_q(q);
        if (q < 0.0 && !options.audit_mode) throw ValidationError("negative q is only supported by the triangle audit");
    }

    const auto boxes = partition(panel.length(), scale);
    const PolynomialDetrender detrender(scale, options.order);

    std::vector<std::optional<BoxResiduals>> residuals(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        residuals[i].emplace(panel.series(i), boxes, detrender);
        require_fluctuating(*residuals[i], panel.series(i), panel.label(i));
    });

    const std::size_t nq = q_values.size();
    auto self_fluctuation = [&](std::size_t i, double q) {
        const auto var = residuals[i]->variances();
        double f = 0.0;
        try {
            f = q_average(var, q);
        } catch (const ComputationError& e) {
            throw ComputationError("series '" + panel.label(i) + "' at s=" + std::to_string(scale) + ": " + e.what());
        }
        if (!(f > 0.0)) {
            throw ComputationError("series '" + panel.label(i) + "' has zero detrended fluctuation at s=" +
                                   std::to_string(scale));
        }
        return f;
    };

    // F_zz per (series, q); read-only during the pair pass.
    std::vector<double> cache(n * nq);
    if (options.use_cache) {
        parallel_for(n, options.threads, [&](std::size_t i) {
            for (std::size_t k = 0; k < nq; ++k) cache[i * nq + k] = self_fluctuation(i, q_values[k]);
        });
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    std::vector<double> rho(pairs.size() * nq);
    parallel_for(pairs.size(), options.threads, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const auto cov = residuals[i]->moments_with(*residuals[j]);
        for (std::size_t k = 0; k < nq; ++k) {
            const double q = q_values[k];
            const double fxx = options.use_cache ? cache[i * nq + k] : self_fluctuation(i, q);
            const double fyy = options.use_cache ? cache[j * nq + k] : self_fluctuation(j, q);
            try {
                rho[p * nq + k] = combine_rho(q_average(cov, q), fxx, fyy, q, options.audit_mode);
            } catch (const ComputationError& e) {
                throw ComputationError("pair (" + panel.label(i) + ", " + panel.label(j) +
                                       ") at s=" + std::to_string(scale) + ": " + e.what());
            }
        }
    });

    std::vector<RhoMatrix> out(nq);
    for (std::size_t k = 0; k < nq; ++k) {
        auto& m = out[k];
        static_cast<SymmetricMatrix&>(m) = SymmetricMatrix(panel.labels(), 1.0);
        m.scale = scale;
        m.q = q_values[k];
        m.order = options.order;
        for (std::size_t p = 0; p < pairs.size(); ++p) m.set(pairs[p].first, pairs[p].second, rho[p * nq + k]);
    }
    return out;
}

namespace {

double distance_from(double c, std::size_t i, std::size_t j, const std::vector<std::string>& labels) {
    if (!std::isfinite(c)) throw ComputationError("non-finite coefficient for (" + labels[i] + ", " + labels[j] + ")");
    if (c > 1.0) {
        if (c > 1.0 + kRhoClampTolerance) {
            throw ComputationError("coefficient " + csv::format_sig(c, 17) + " above 1 for (" + labels[i] + ", " +
                                   labels[j] + ")");
        }
        c = 1.0;
    }
    if (c < -1.0 - kRhoClampTolerance) {
        throw ComputationError("coefficient " + csv::format_sig(c, 17) + " below -1 for (" + labels[i] + ", " +
                               labels[j] + ")");
    }
    return std::sqrt(2.0 * (1.0 - std::max(c, -1.0)));
}

}  // namespace

DistanceMatrix correlation_distance(const SymmetricMatrix& correlation) {
    DistanceMatrix d;
    static_cast<SymmetricMatrix&>(d) = SymmetricMatrix(correlation.labels(), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) d.set(i, j, distance_from(correlation(i, j), i, j, d.labels()));
    return d;
}

DistanceMatrix to_distance(const RhoMatrix& rho) {
    auto d = correlation_distance(rho);
    d.scale = rho.scale;
    d.q = rho.q;
    return d;
}

TriangleAuditReport triangle_audit(const SymmetricMatrix& d, double tolerance) {
    const std::size_t n = d.size();
    if (n < 3) throw ValidationError("triangle audit needs at least three nodes");
    TriangleAuditReport report;
    report.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const double ij = d(i, j), jk = d(j, k), ik = d(i, k);
                const double slack = std::min({ij + jk - ik, ij + ik - jk, ik + jk - ij});
                ++report.triples_checked;
                if (slack < -tolerance) ++report.violations;
                report.worst_slack = std::min(report.worst_slack, slack);
            }
        }
    }
    return report;
}

std::string matrix_to_csv(const SymmetricMatrix& m, const std::string& corner) {
    std::vector<std::string> row;
    row.push_back(corner);
    row.insert(row.end(), m.labels().begin(), m.labels().end());
    std::string out = csv::join(row) + "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        row.assign(1, m.labels()[i]);
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(csv::format_sig(m(i, j), 12));
        out += csv::join(row);
        out += '\n';
    }
    return out;
}

void write_matrix_csv(const std::string& path, const SymmetricMatrix& m, const std::string& corner) {
    write_text(path, matrix_to_csv(m, corner));
}

SymmetricMatrix read_matrix_csv(const std::string& path) {
    const auto table = csv::read(path);
    const std::size_t n = table.header.size() - 1;
    std::vector<std::string> labels(table.header.begin() + 1, table.header.end());
    if (table.rows.size() != n) throw IoError(path + ": matrix is not square");
    std::vector<double> values(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (table.rows[i][0] != labels[i]) throw IoError(path + ": row label '" + table.rows[i][0] + "' out of order");
        for (std::size_t j = 0; j < n; ++j) values[i * n + j] = csv::to_double(table.rows[i][j + 1], path);
    }
    return SymmetricMatrix(std::move(labels), std::move(values));
}

}  // namespace qmst
