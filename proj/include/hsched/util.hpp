#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace hsched {

// Shortest round-trip representation. Every text emitter (CSV, JSON, traces)
// goes through this so repeated runs produce byte-identical files.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Log-uniform on [lo, hi]; collapses to a point mass when lo == hi.
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    if (lo <= 0.0) throw std::domain_error("log_uniform: bounds must be positive");
    if (lo >= hi) return lo;
    return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

inline double log_uniform_mean(double lo, double hi) {
    if (lo >= hi) return lo;
    return (hi - lo) / std::log(hi / lo);
}

inline double exponential(std::mt19937_64& rng, double mean) {
    return -mean * std::log1p(-uniform01(rng));
}

inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;  // modulo bias is immaterial at 2^64
}

// splitmix64 finalizer, used for deriving per-run seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace hsched
