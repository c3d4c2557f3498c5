#include "qmst/fluct.hpp"

#include "qmst/error.hpp"

#include <cmath>
#include <limits>

namespace qmst {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

}  // namespace

void require_supported_q(double q) {
    if (!std::isfinite(q)) throw ValidationError("q must be finite");
    if (q == 0.0) throw ValidationError("q = 0 is not supported (the q/2 power average degenerates)");
}

std::vector<std::string> DetrendConfig::validate(std::size_t length, bool allow_negative_q) const {
    if (scales.empty()) throw ValidationError("no scales requested");
    if (q_values.empty()) throw ValidationError("no q values requested");
    std::vector<std::string> warnings;
    for (const std::size_t s : scales) {
        if (s < order + 2) {
            throw ValidationError("scale " + std::to_string(s) + " is below order + 2 = " + std::to_string(order + 2));
        }
        if (s > length) {
            throw ValidationError("scale " + std::to_string(s) + " exceeds series length " + std::to_string(length));
        }
        if (4 * s > length) {
            warnings.push_back("scale " + std::to_string(s) + " leaves fewer than 8 boxes for series length " +
                               std::to_string(length));
        }
    }
    for (const double q : q_values) {
        require_supported_q(q);
        if (q < 0.0 && !allow_negative_q) {
            throw ValidationError("negative q is only supported by the triangle audit");
        }
    }
    return warnings;
}

BoxPartition partition(std::size_t length, std::size_t scale) {
    if (scale == 0) throw ValidationError("scale must be positive");
    if (scale > length) {
        throw ValidationError("scale " + std::to_string(scale) + " exceeds series length " + std::to_string(length));
    }
    BoxPartition p;
    p.length = length;
    p.scale = scale;
    p.boxes_per_family = length / scale;
    p.starts.reserve(2 * p.boxes_per_family);
    for (std::size_t v = 0; v < p.boxes_per_family; ++v) p.starts.push_back(v * scale);
    for (std::size_t v = 0; v < p.boxes_per_family; ++v) p.starts.push_back(length - (v + 1) * scale);
    return p;
}

PolynomialDetrender::PolynomialDetrender(std::size_t scale, unsigned order)
    : scale_(scale), order_(order), basis_((order + 1) * scale) {
    if (scale < order + 2) {
        throw ValidationError("scale " + std::to_string(scale) + " is too small for a polynomial of order " +
                              std::to_string(order));
    }
    const double s = static_cast<double>(scale);
    std::vector<double> t(scale);
    for (std::size_t i = 0; i < scale; ++i) t[i] = (2.0 * static_cast<double>(i + 1) - (s + 1.0)) / (s - 1.0);

    auto phi = [&](unsigned k) { return std::span<double>(basis_.data() + k * scale, scale); };
    const double c0 = 1.0 / std::sqrt(s);
    for (auto& v : phi(0)) v = c0;

    std::vector<double> p(scale);
    double beta = 0.0;
    for (unsigned k = 0; k < order; ++k) {
        const auto cur = phi(k);
        for (std::size_t i = 0; i < scale; ++i) p[i] = t[i] * cur[i];
        const double alpha = dot(p, cur);
        for (std::size_t i = 0; i < scale; ++i) {
            p[i] -= alpha * cur[i];
            if (k > 0) p[i] -= beta * phi(k - 1)[i];
        }
        for (unsigned j = 0; j <= k; ++j) {
            const auto pj = phi(j);
            const double c = dot(p, pj);
            for (std::size_t i = 0; i < scale; ++i) p[i] -= c * pj[i];
        }
        const double norm = std::sqrt(dot(p, p));
        if (!(norm > 1e3 * std::numeric_limits<double>::epsilon())) {
            throw ComputationError("polynomial basis of order " + std::to_string(k + 1) + " is singular at scale " +
                                   std::to_string(scale));
        }
        const auto next = phi(k + 1);
        for (std::size_t i = 0; i < scale; ++i) next[i] = p[i] / norm;
        beta = norm;
    }
}

std::span<const double> PolynomialDetrender::basis(unsigned k) const {
    if (k > order_) throw ValidationError("basis index out of range");
    return {basis_.data() + k * scale_, scale_};
}

void PolynomialDetrender::detrend_profile(std::span<const double> profile, std::span<double> out) const {
    if (profile.size() != scale_ || out.size() != scale_) throw ValidationError("box length does not match scale");
    if (out.data() != profile.data()) std::copy(profile.begin(), profile.end(), out.begin());
    for (unsigned k = 0; k <= order_; ++k) {
        const auto b = basis(k);
        const double c = dot(out, b);
        for (std::size_t i = 0; i < scale_; ++i) out[i] -= c * b[i];
    }
}

void PolynomialDetrender::residuals(std::span<const double> box, std::span<double> out) const {
    if (box.size() != scale_ || out.size() != scale_) throw ValidationError("box length does not match scale");
    double sum = 0.0;
    for (std::size_t i = 0; i < scale_; ++i) {
        sum += box[i];
        out[i] = sum;
    }
    detrend_profile(out, out);
}

std::vector<double> detrended_residuals(std::span<const double> series, std::size_t start, std::size_t scale,
                                        unsigned order) {
    if (start + scale > series.size()) {
        throw ValidationError("box [" + std::to_string(start) + ", " + std::to_string(start + scale) +
                              ") exceeds series length " + std::to_string(series.size()));
    }
    const PolynomialDetrender detrender(scale, order);
    std::vector<double> out(scale);
    detrender.residuals(series.subspan(start, scale), out);
    return out;
}

BoxMoments box_moments(std::span<const double> res_x, std::span<const double> res_y) {
    if (res_x.size() != res_y.size() || res_x.empty()) throw ValidationError("residual vectors differ in length");
    const double s = static_cast<double>(res_x.size());
    return {dot(res_x, res_y) / s, dot(res_x, res_x) / s, dot(res_y, res_y) / s};
}

double q_average(std::span<const double> box_values, double q) {
    require_supported_q(q);
    if (box_values.empty()) throw ValidationError("no boxes to average");
    const double half = q / 2.0;
    double sum = 0.0;
    for (std::size_t nu = 0; nu < box_values.size(); ++nu) {
        const double f = box_values[nu];
        if (f == 0.0) {
            if (q < 0.0) {
                throw ComputationError("box " + std::to_string(nu) +
                                       " has zero fluctuation; negative q diverges");
            }
            continue;
        }
        const double mag = half == 1.0 ? std::abs(f) : std::pow(std::abs(f), half);
        sum += f < 0.0 ? -mag : mag;
    }
    return sum / static_cast<double>(box_values.size());
}

FluctuationSet fluctuation(std::span<const double> x, std::span<const double> y, std::size_t scale, double q,
                           unsigned order) {
    require_supported_q(q);
    if (x.size() != y.size()) throw ValidationError("series differ in length");
    const auto boxes = partition(x.size(), scale);
    const PolynomialDetrender detrender(scale, order);
    std::vector<double> rx(scale), ry(scale);
    std::vector<double> fxy(boxes.box_count()), fxx(boxes.box_count()), fyy(boxes.box_count());
    for (std::size_t nu = 0; nu < boxes.box_count(); ++nu) {
        detrender.residuals(x.subspan(boxes.starts[nu], scale), rx);
        detrender.residuals(y.subspan(boxes.starts[nu], scale), ry);
        const auto m = box_moments(rx, ry);
        fxy[nu] = m.xy;
        fxx[nu] = m.xx;
        fyy[nu] = m.yy;
    }
    return {q_average(fxy, q), q_average(fxx, q), q_average(fyy, q), scale, q, order};
}

BoxResiduals::BoxResiduals(std::span<const double> series, const BoxPartition& boxes,
                           const PolynomialDetrender& detrender)
    : scale_(boxes.scale), box_count_(boxes.box_count()), values_(boxes.box_count() * boxes.scale) {
    if (detrender.scale() != boxes.scale) throw ValidationError("detrender scale does not match partition");
    if (series.size() != boxes.length) throw ValidationError("series length does not match partition");
    for (std::size_t nu = 0; nu < box_count_; ++nu) {
        detrender.residuals(series.subspan(boxes.starts[nu], scale_),
                            std::span<double>(values_.data() + nu * scale_, scale_));
    }
}

std::vector<double> BoxResiduals::moments_with(const BoxResiduals& other) const {
    if (other.scale_ != scale_ || other.box_count_ != box_count_) {
        throw ValidationError("residual sets use different partitions");
    }
    const double s = static_cast<double>(scale_);
    std::vector<double> out(box_count_);
    for (std::size_t nu = 0; nu < box_count_; ++nu) out[nu] = dot(box(nu), other.box(nu)) / s;
    return out;
}

}  // namespace qmst
