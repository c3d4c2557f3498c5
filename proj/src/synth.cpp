#include "qmst/synth.hpp"

#include "qmst/csv.hpp"
#include "qmst/error.hpp"
#include "qmst/ingest.hpp"
#include "qmst/parallel.hpp"
#include "qmst/rng.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <random>
#include <string>

namespace qmst {
namespace {

// FFTW's planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
    if (!p) throw ComputationError("FFT buffer allocation failed");
    return FftwBuffer<T>(p);
}

class Plans {
public:
    Plans(std::size_t n, double* real, fftw_complex* spec) {
        std::lock_guard lock(planner_mutex());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real, FFTW_ESTIMATE);
        if (!forward_ || !backward_) throw ComputationError("FFT planning failed");
    }
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;

    void forward(double* real, fftw_complex* spec) const { fftw_execute_dft_r2c(forward_, real, spec); }
    void backward(fftw_complex* spec, double* real) const { fftw_execute_dft_c2r(backward_, spec, real); }

private:
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

std::vector<std::string> numbered_labels(const std::string& prefix, std::size_t n) {
    const std::size_t width = std::to_string(n).size();
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) {
        auto num = std::to_string(i);
        out.push_back(prefix + std::string(width - num.size(), '0') + num);
    }
    return out;
}

}  // namespace

void ArfimaParams::validate() const {
    if (!(std::abs(d) < 0.5)) throw ValidationError("ARFIMA d must satisfy |d| < 0.5");
    if (truncation < 1) throw ValidationError("ARFIMA truncation must be at least 1");
    if (length < 1) throw ValidationError("ARFIMA length must be positive");
}

void CorrelatedPairParams::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in [0, 1]");
    if (length < 1) throw ValidationError("pair length must be positive");
}

std::vector<double> arfima_weights(double d, std::size_t truncation) {
    std::vector<double> a(truncation + 1);
    a[0] = 1.0;
    for (std::size_t j = 1; j <= truncation; ++j) {
        a[j] = a[j - 1] * (static_cast<double>(j) - 1.0 + d) / static_cast<double>(j);
    }
    return a;
}

std::vector<double> moving_average_filter(std::span<const double> noise, std::span<const double> weights,
                                          std::size_t length) {
    if (weights.empty()) throw ValidationError("empty filter");
    const std::size_t k = weights.size() - 1;
    if (noise.size() != length + k) throw ValidationError("noise must hold length + truncation samples");

    // Circular convolution of size >= length + K: outputs K..K+length-1 never wrap.
    std::size_t n = 1;
    while (n < length + k) n <<= 1;
    const std::size_t bins = n / 2 + 1;
    auto real = fftw_buffer<double>(n);
    auto spec_a = fftw_buffer<fftw_complex>(bins);
    auto spec_e = fftw_buffer<fftw_complex>(bins);
    const Plans plans(n, real.get(), spec_a.get());

    std::fill(real.get(), real.get() + n, 0.0);
    std::copy(weights.begin(), weights.end(), real.get());
    plans.forward(real.get(), spec_a.get());

    std::fill(real.get(), real.get() + n, 0.0);
    std::copy(noise.begin(), noise.end(), real.get());
    plans.forward(real.get(), spec_e.get());

    for (std::size_t b = 0; b < bins; ++b) {
        const std::complex<double> x(spec_a[b][0], spec_a[b][1]);
        const std::complex<double> y(spec_e[b][0], spec_e[b][1]);
        const auto z = x * y;
        spec_e[b][0] = z.real();
        spec_e[b][1] = z.imag();
    }
    plans.backward(spec_e.get(), real.get());

    std::vector<double> out(length);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t t = 0; t < length; ++t) out[t] = real[t + k] * scale;
    return out;
}

SeriesPanel arfima_panel(std::size_t n, const ArfimaParams& params, unsigned threads) {
    params.validate();
    if (n == 0) throw ValidationError("panel must contain at least one series");
    const auto weights = arfima_weights(params.d, params.truncation);
    const Rng master(params.seed);
    std::vector<std::vector<double>> series(n);
    parallel_for(n, threads, [&](std::size_t i) {
        Rng rng = master.split(i);
        std::vector<double> noise(params.length + params.truncation);
        for (auto& v : noise) v = rng.normal();
        if (params.d == 0.0) {
            series[i].assign(noise.begin() + static_cast<std::ptrdiff_t>(params.truncation), noise.end());
        } else {
            series[i] = moving_average_filter(noise, weights, params.length);
        }
    });
    return SeriesPanel(numbered_labels("S", n), std::move(series),
                       Provenance{{"arfima:d=" + csv::format_exact(params.d) +
                                   ":K=" + std::to_string(params.truncation)},
                                  params.seed});
}

SeriesPanel correlated_pair_panel(std::size_t n_pairs, const CorrelatedPairParams& params) {
    params.validate();
    if (n_pairs == 0) throw ValidationError("panel must contain at least one pair");
    const Rng master(params.seed);
    const double mix = std::sqrt(1.0 - params.gamma * params.gamma);
    const auto xs = numbered_labels("X", n_pairs);
    const auto ys = numbered_labels("Y", n_pairs);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> series;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        Rng rng = master.split(p);
        std::vector<double> x(params.length), y(params.length);
        for (auto& v : x) v = rng.normal();
        for (std::size_t t = 0; t < params.length; ++t) {
            const double eta = rng.normal();
            y[t] = params.gamma == 1.0 ? x[t] : params.gamma * x[t] + mix * eta;
        }
        labels.push_back(xs[p]);
        labels.push_back(ys[p]);
        series.push_back(std::move(x));
        series.push_back(std::move(y));
    }
    return SeriesPanel(std::move(labels), std::move(series),
                       Provenance{{"pairs:gamma=" + csv::format_exact(params.gamma)}, params.seed});
}

SeriesPanel heavy_tailed_pair_panel(std::size_t n_pairs, const CorrelatedPairParams& params, double dof) {
    if (!(dof > 0.0)) throw ValidationError("Student-t degrees of freedom must be positive");
    const auto base = correlated_pair_panel(n_pairs, params);
    const Rng master(derive_seed(params.seed, 0x5EEDu));
    std::vector<std::vector<double>> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        Rng rng = master.split(i);
        std::student_t_distribution<double> t(dof);
        std::vector<double> target(base.length());
        for (auto& v : target) v = t(rng.engine());
        out[i] = rank_remap(base.series(i), std::move(target));
    }
    return base.with_series(std::move(out), "student-t-marginals:dof=" + csv::format_exact(dof));
}

SeriesPanel gaussian_panel(std::size_t n, std::size_t length, std::uint64_t seed) {
    if (n == 0 || length == 0) throw ValidationError("empty Gaussian panel requested");
    const Rng master(seed);
    std::vector<std::vector<double>> series(n, std::vector<double>(length));
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = master.split(i);
        for (auto& v : series[i]) v = rng.normal();
    }
    return SeriesPanel(numbered_labels("G", n), std::move(series), Provenance{{"gaussian"}, seed});
}

}  // namespace qmst
