#include "qmst/similarity.hpp"

#include "qmst/csv.hpp"
#include "qmst/error.hpp"
#include "qmst/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qmst {

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("pearson: need equal lengths >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        mx += x[t];
        my += y[t];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double a = x[t] - mx, b = y[t] - my;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw ComputationError("pearson: constant series");
    // (T - 1) normalization cancels between numerator and denominator.
    const double c = sxy / std::sqrt(sxx * syy);
    return std::clamp(c, -1.0, 1.0);
}

PearsonMatrix pearson_matrix(const SeriesPanel& returns, std::size_t dt) {
    const auto sampled = aggregate_returns(returns, dt);
    PearsonMatrix m;
    static_cast<SymmetricMatrix&>(m) = SymmetricMatrix(sampled.labels(), 1.0);
    m.dt = dt;
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        for (std::size_t j = i + 1; j < sampled.size(); ++j) {
            try {
                m.set(i, j, pearson(sampled.series(i), sampled.series(j)));
            } catch (const ComputationError& e) {
                throw ComputationError("pair (" + sampled.label(i) + ", " + sampled.label(j) + "): " + e.what());
            }
        }
    }
    return m;
}

std::vector<double> vectorize_upper(const SymmetricMatrix& m) {
    std::vector<double> out;
    out.reserve(m.size() * (m.size() - (m.size() > 0 ? 1 : 0)) / 2);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) out.push_back(m(i, j));
    return out;
}

double scalar_product(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("scalar_product: vectors differ in length");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ab += a[k] * b[k];
        aa += a[k] * a[k];
        bb += b[k] * b[k];
    }
    if (!(aa > 0.0) || !(bb > 0.0)) throw ComputationError("scalar_product: zero-norm vector");
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

SimilarityReport similarity_grid(const SeriesPanel& returns, std::span<const std::size_t> dts,
                                 std::span<const std::size_t> scales, std::span<const double> q_values,
                                 const RhoOptions& options) {
    if (dts.empty() || scales.empty() || q_values.empty()) throw ValidationError("empty similarity grid");
    std::vector<std::vector<double>> pearson_vectors;
    for (const auto dt : dts) pearson_vectors.push_back(vectorize_upper(pearson_matrix(returns, dt)));

    SimilarityReport report;
    report.vector_length = pearson_vectors.front().size();
    // rho vectors indexed [scale][q]
    std::vector<std::vector<std::vector<double>>> rho_vectors;
    for (const auto s : scales) {
        auto& row = rho_vectors.emplace_back();
        for (const auto& m : rho_matrices(returns, s, q_values, options)) row.push_back(vectorize_upper(m));
    }
    for (std::size_t di = 0; di < dts.size(); ++di)
        for (std::size_t si = 0; si < scales.size(); ++si)
            for (std::size_t qi = 0; qi < q_values.size(); ++qi)
                report.entries.push_back({dts[di], scales[si], q_values[qi],
                                          scalar_product(pearson_vectors[di], rho_vectors[si][qi])});
    return report;
}

std::string similarity_to_csv(const SimilarityReport& report) {
    std::vector<double> qs;
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    std::map<std::pair<std::pair<std::size_t, std::size_t>, double>, double> cell;
    for (const auto& e : report.entries) {
        if (std::find(qs.begin(), qs.end(), e.q) == qs.end()) qs.push_back(e.q);
        const std::pair<std::size_t, std::size_t> key{e.dt, e.scale};
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
        cell[{key, e.q}] = e.p;
    }
    std::vector<std::string> header = {"dt", "s"};
    for (const double q : qs) header.push_back("q=" + csv::format_exact(q));
    std::string out = csv::join(header) + "\n";
    for (const auto& key : rows) {
        std::vector<std::string> row = {std::to_string(key.first), std::to_string(key.second)};
        for (const double q : qs) {
            const auto it = cell.find({key, q});
            row.push_back(it == cell.end() ? "nan" : csv::format_sig(it->second, 6));
        }
        out += csv::join(row) + "\n";
    }
    return out;
}

}  // namespace qmst
