#pragma once

#include <cmath>
#include <cstdint>

namespace blockrip {

// Counter-based pseudo-random stream.
//
// The i-th output is mix64(key + i * GAMMA) where key is derived from
// (master_seed, stream_index) once. Because draws are a pure function of
// (master_seed, stream_index, counter), a trial that owns its stream index
// produces the same numbers no matter how trials are scheduled across
// worker threads. mix64 is the splitmix64 finalizer.
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
        : master_seed_(master_seed), stream_index_(stream_index) {
        key_ = mix64(master_seed_ ^ mix64(stream_index_ + 0x77102DCDE3F3ULL));
    }

    std::uint64_t next_u64() {
        std::uint64_t v = key_ + counter_ * 0x9E3779B97F4A7C15ULL;
        ++counter_;
        return mix64(v);
    }

    // Uniform on (0, 1]; never returns 0 so log() is safe.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal by Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    // Random sign, +1 or -1 with equal probability.
    double sign() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Independent stream derived from this one; used to hand each trial,
    // block or worker its own substream.
    RngStream substream(std::uint64_t i) const {
        return RngStream(master_seed_,
                         mix64(stream_index_ * 0x9E3779B97F4A7C15ULL ^
                               mix64(i + 0x632BE59BD9B4E019ULL)));
    }

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace blockrip
