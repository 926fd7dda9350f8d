#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace iccv {

// Counter-based random stream (Philox4x32-10). A stream is addressed by a
// 64-bit seed plus a path of non-negative integers (e.g. {replicate, study});
// identical (seed, path) always reproduces the identical variate sequence,
// independent of how work is scheduled across threads.
//
// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::span<const std::uint64_t> path = {});
    RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    // Substream addressed by appending `index` to this stream's path.
    // Children are independent of the parent and of each other; deriving a
    // child does not disturb the parent's sequence.
    RandomStream child(std::uint64_t index) const;

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1).
    double next_uniform();
    // Standard normal via inverse-CDF transform (monotone in the uniform).
    double next_normal();

    std::uint64_t seed() const { return seed_; }
    const std::vector<std::uint64_t>& path() const { return path_; }

private:
    void init_from_path();
    void refill();

    std::uint64_t seed_ = 0;
    std::vector<std::uint64_t> path_;

    std::uint32_t key_[2] = {0, 0};   // per-stream Philox key
    std::uint64_t stream_hi_ = 0;     // upper counter half, fixed per stream
    std::uint64_t block_ = 0;         // lower counter half, advances per block
    std::uint64_t buf_[2] = {0, 0};
    int buf_pos_ = 2;
};

} // namespace iccv
