#include "qmst/ingest.hpp"

#include "qmst/csv.hpp"
#include "qmst/error.hpp"
#include "qmst/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmst {

SeriesPanel log_returns(const PricePanel& prices, const ReturnOptions& options) {
    const std::size_t len = prices.length();
    if (options.dt == 0) throw ValidationError("return interval dt must be positive");
    if (options.dt >= len) {
        throw ValidationError("return interval dt=" + std::to_string(options.dt) + " is not below series length " +
                              std::to_string(len));
    }
    const std::size_t count = (len - 1) / options.dt;

    std::vector<bool> keep(count, true);
    if (options.drop_gaps && prices.timestamps()) {
        const auto& ts = *prices.timestamps();
        for (std::size_t k = 0; k < count; ++k) {
            keep[k] = ts[(k + 1) * options.dt] - ts[k * options.dt] == static_cast<std::int64_t>(options.dt);
        }
    }

    std::vector<std::vector<double>> out(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        const auto p = prices.prices(i);
        auto& r = out[i];
        r.reserve(count);
        for (std::size_t k = 0; k < count; ++k) {
            if (!keep[k]) continue;
            r.push_back(std::log(p[(k + 1) * options.dt]) - std::log(p[k * options.dt]));
        }
    }
    std::string step = "log-returns:dt=" + std::to_string(options.dt);
    if (options.drop_gaps && prices.timestamps()) step += ":drop-gaps";
    return SeriesPanel(prices.tickers(), std::move(out), Provenance{{std::move(step)}, std::nullopt});
}

SeriesPanel aggregate_returns(const SeriesPanel& returns, std::size_t dt) {
    if (dt == 0) throw ValidationError("aggregation interval must be positive");
    if (dt == 1) return returns;
    const std::size_t count = returns.length() / dt;
    if (count == 0) throw ValidationError("aggregation interval exceeds series length");
    std::vector<std::vector<double>> out(returns.size(), std::vector<double>(count));
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const auto r = returns.series(i);
        for (std::size_t k = 0; k < count; ++k) {
            double sum = 0.0;
            for (std::size_t j = 0; j < dt; ++j) sum += r[k * dt + j];
            out[i][k] = sum;
        }
    }
    return returns.with_series(std::move(out), "aggregate:dt=" + std::to_string(dt));
}

void TransformSpec::validate() const {
    const bool amp = kind == TransformKind::amp_shuffle_above || kind == TransformKind::amp_shuffle_below;
    if (amp && !(threshold_sigma > 0.0)) {
        throw ValidationError("amplitude shuffle threshold must be a positive multiple of sigma");
    }
}

std::string TransformSpec::to_string() const {
    switch (kind) {
        case TransformKind::shuffle: return "shuffle";
        case TransformKind::gaussianize: return "gaussianize";
        case TransformKind::sign: return "sign";
        case TransformKind::amp_shuffle_above:
        case TransformKind::amp_shuffle_below: {
            std::string s = kind == TransformKind::amp_shuffle_above ? "amp-shuffle-above:" : "amp-shuffle-below:";
            s += csv::format_exact(threshold_sigma);
            if (!absolute) s += ":signed";
            return s;
        }
    }
    return "?";
}

TransformSpec TransformSpec::parse(const std::string& text, std::uint64_t seed) {
    TransformSpec spec;
    spec.seed = seed;
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    const auto& name = parts.front();
    if (name == "shuffle" || name == "gaussianize" || name == "sign") {
        if (parts.size() != 1) throw ValidationError("transform '" + name + "' takes no arguments");
        spec.kind = name == "shuffle"       ? TransformKind::shuffle
                    : name == "gaussianize" ? TransformKind::gaussianize
                                            : TransformKind::sign;
        return spec;
    }
    if (name != "amp-shuffle-above" && name != "amp-shuffle-below") {
        throw ValidationError("unknown transform '" + name + "'");
    }
    spec.kind = name == "amp-shuffle-above" ? TransformKind::amp_shuffle_above : TransformKind::amp_shuffle_below;
    if (parts.size() < 2 || parts.size() > 3) {
        throw ValidationError("transform '" + name + "' expects a threshold, e.g. " + name + ":1.8");
    }
    try {
        spec.threshold_sigma = csv::to_double(parts[1], "transform '" + text + "'");
    } catch (const IoError& e) {
        throw ValidationError(e.what());
    }
    if (parts.size() == 3) {
        if (parts[2] != "signed" && parts[2] != "abs") {
            throw ValidationError("transform '" + text + "': mode must be 'abs' or 'signed'");
        }
        spec.absolute = parts[2] == "abs";
    }
    spec.validate();
    return spec;
}

std::vector<std::size_t> rank_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order;
}

std::vector<double> rank_remap(std::span<const double> values, std::vector<double> target) {
    if (target.size() != values.size()) throw ValidationError("rank_remap: size mismatch");
    std::sort(target.begin(), target.end());
    const auto order = rank_order(values);
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < order.size(); ++k) out[order[k]] = target[k];
    return out;
}

double sample_stddev(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

SeriesPanel shuffle(const SeriesPanel& panel, std::uint64_t seed) {
    const Rng master(seed);
    std::vector<std::vector<double>> out = panel.all_series();
    for (std::size_t i = 0; i < out.size(); ++i) {
        Rng rng = master.split(i);
        std::shuffle(out[i].begin(), out[i].end(), rng.engine());
    }
    return panel.with_series(std::move(out), "shuffle", seed);
}

SeriesPanel gaussianize(const SeriesPanel& panel, std::uint64_t seed) {
    if (panel.length() < 2) throw ValidationError("gaussianize requires series of length >= 2");
    const Rng master(seed);
    std::vector<std::vector<double>> out(panel.size());
    for (std::size_t i = 0; i < panel.size(); ++i) {
        Rng rng = master.split(i);
        std::vector<double> normals(panel.length());
        for (auto& v : normals) v = rng.normal();
        out[i] = rank_remap(panel.series(i), std::move(normals));
    }
    return panel.with_series(std::move(out), "gaussianize", seed);
}

SeriesPanel sign_series(const SeriesPanel& panel) {
    std::vector<std::vector<double>> out = panel.all_series();
    for (auto& s : out) {
        for (auto& v : s) v = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
    return panel.with_series(std::move(out), "sign");
}

SeriesPanel amplitude_partition_shuffle(const SeriesPanel& panel, const TransformSpec& spec) {
    if (spec.kind != TransformKind::amp_shuffle_above && spec.kind != TransformKind::amp_shuffle_below) {
        throw ValidationError("amplitude_partition_shuffle requires an amp-shuffle transform");
    }
    spec.validate();
    const bool above = spec.kind == TransformKind::amp_shuffle_above;
    const Rng master(spec.seed);
    std::vector<std::vector<double>> out = panel.all_series();
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& s = out[i];
        const double cut = spec.threshold_sigma * sample_stddev(s);
        std::vector<std::size_t> positions;
        for (std::size_t t = 0; t < s.size(); ++t) {
            const double a = spec.absolute ? std::abs(s[t]) : s[t];
            if (above ? a > cut : a < cut) positions.push_back(t);
        }
        std::vector<double> selected(positions.size());
        for (std::size_t k = 0; k < positions.size(); ++k) selected[k] = s[positions[k]];
        Rng rng = master.split(i);
        std::shuffle(selected.begin(), selected.end(), rng.engine());
        for (std::size_t k = 0; k < positions.size(); ++k) s[positions[k]] = selected[k];
    }
    return panel.with_series(std::move(out), spec.to_string(), spec.seed);
}

SeriesPanel apply_transform(const SeriesPanel& panel, const TransformSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case TransformKind::shuffle: return shuffle(panel, spec.seed);
        case TransformKind::gaussianize: return gaussianize(panel, spec.seed);
        case TransformKind::sign: return sign_series(panel);
        case TransformKind::amp_shuffle_above:
        case TransformKind::amp_shuffle_below: return amplitude_partition_shuffle(panel, spec);
    }
    throw ValidationError("unknown transform");
}

}  // namespace qmst
