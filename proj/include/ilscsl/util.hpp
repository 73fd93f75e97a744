#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ilscsl {

// splitmix64; used to derive independent child seeds from (seed, salt) so that
// parallel or reordered consumers see identical streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return mix64(seed ^ mix64(salt));
}

// Uniform double in [0,1) from raw engine bits. std::uniform_real_distribution
// is not pinned down by the standard; this is, so sampled data is reproducible
// across compilers.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// FNV-1a 64-bit. Good enough for cache keys and input digests; not crypto.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string to_hex(std::uint64_t v);

// FNV-1a digest of a file's bytes as a hex string. Throws InputError if the
// file cannot be read.
std::string file_digest_hex(const std::string& path);

// Current UTC time as an ISO 8601 string.
std::string utc_timestamp();

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// True if v is strictly increasing (the canonical form for index sets).
bool sorted_unique(const std::vector<int>& v);

}  // namespace ilscsl
