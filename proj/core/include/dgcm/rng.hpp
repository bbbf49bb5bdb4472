#pragma once

#include <cmath>
#include <cstdint>

namespace dgcm {

/// Splittable 64-bit pseudo-random generator (splitmix64 update with
/// Stafford's mix13 finalizer).
///
/// Streams are derived by index, not by draw order: `substream(i)` yields a
/// statistically independent generator for any index, so work items seeded
/// as `rng.substream(item)` produce identical results no matter how they are
/// scheduled across threads. All Monte Carlo code in this library derives
/// one substream per simulation / replication / hypothesis for exactly that
/// reason.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += kGolden);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the paired deviate is cached.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the logarithm is finite.
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = next_double();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Independent generator for the given stream index. Derivation mixes
    /// the index into the current state without advancing this generator.
    [[nodiscard]] SplitRng substream(std::uint64_t index) const {
        SplitRng child(state_ ^ (0x9e3779b97f4a7c15ULL + index * 0xd1342543de82ef95ULL));
        child.state_ = mix(child.state_ + kGolden);
        return child;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dgcm
