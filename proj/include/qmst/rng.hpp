#pragma once

#include <cstdint>
#include <random>

namespace qmst {

/// splitmix64 finalizer; used to derive independent child seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `index` of `master`. Independent of the order in
/// which streams are requested.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix_seed(mix_seed(master) ^ mix_seed(index + 0xD1B54A32D192ED03ULL));
}

/// Seedable, splittable generator. Each series / surrogate set / pair draws
/// from its own stream obtained through split().
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

    [[nodiscard]] Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    engine_type& engine() noexcept { return engine_; }

    double normal() { return normal_(engine_); }

private:
    std::uint64_t seed_;
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qmst
