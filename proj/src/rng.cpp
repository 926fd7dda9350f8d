#include "iccv/rng.hpp"

#include "iccv/normal.hpp"

namespace iccv {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

// splitmix64 finalizer; used to absorb the (seed, path) address into the key.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr[0] = hi1 ^ ctr[1] ^ key[0];
    ctr[1] = lo1;
    ctr[2] = hi0 ^ ctr[3] ^ key[1];
    ctr[3] = lo0;
}

void philox4x32_10(const std::uint32_t counter[4], const std::uint32_t key_in[2],
                   std::uint32_t out[4]) {
    std::uint32_t key[2] = {key_in[0], key_in[1]};
    for (int i = 0; i < 4; ++i) out[i] = counter[i];
    for (int round = 0; round < 10; ++round) {
        philox_round(out, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed, std::span<const std::uint64_t> path)
    : seed_(seed), path_(path.begin(), path.end()) {
    init_from_path();
}

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : RandomStream(seed, std::span<const std::uint64_t>(path.begin(), path.size())) {}

void RandomStream::init_from_path() {
    // Sponge-like absorption: each path element passes through the mix64
    // bijection, so distinct (seed, path) addresses land on distinct keys
    // with overwhelming probability, including prefix-related paths.
    std::uint64_t h = mix64(seed_ ^ 0x49434356ull); // "ICCV"
    for (std::uint64_t p : path_) h = mix64(h ^ (p + 0xA0761D6478BD642Full));
    const std::uint64_t key = mix64(h ^ 0x8BB84B93962EACC9ull);
    key_[0] = static_cast<std::uint32_t>(key);
    key_[1] = static_cast<std::uint32_t>(key >> 32);
    stream_hi_ = mix64(h ^ 0x2D358DCCAA6C78A5ull);
    block_ = 0;
    buf_pos_ = 2;
}

RandomStream RandomStream::child(std::uint64_t index) const {
    RandomStream c(*this);
    c.path_.push_back(index);
    c.init_from_path();
    return c;
}

void RandomStream::refill() {
    const std::uint32_t counter[4] = {
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_hi_),
        static_cast<std::uint32_t>(stream_hi_ >> 32),
    };
    std::uint32_t out[4];
    philox4x32_10(counter, key_, out);
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++block_;
    buf_pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
    if (buf_pos_ >= 2) refill();
    return buf_[buf_pos_++];
}

double RandomStream::next_uniform() {
    // 53 random bits, shifted into the open interval (0, 1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
    return std_normal_quantile(next_uniform());
}

} // namespace iccv
