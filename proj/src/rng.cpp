#include "spdv/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spdv::rng {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(prod);
    hi = static_cast<std::uint32_t>(prod >> 32);
}

inline std::array<std::uint32_t, 4> round_once(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kPhiloxM4x32A, c[0], lo0, hi0);
    mul_hi_lo(kPhiloxM4x32B, c[2], lo1, hi1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        ctr = round_once(ctr, key);
        key[0] += kPhiloxW32A;
        key[1] += kPhiloxW32B;
    }
    return ctr;
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(mix64(seed) ^ mix64(tag ^ 0xA5A5A5A5A5A5A5A5ull));
}

Substream::Substream(std::uint64_t master_seed, std::uint64_t path_index,
                     std::uint32_t substream_id) {
    const std::uint64_t k = mix64(master_seed);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    // Counter layout: [block_index, substream, path_lo, path_hi].
    base_ = {0u, substream_id, static_cast<std::uint32_t>(path_index),
             static_cast<std::uint32_t>(path_index >> 32)};
}

void Substream::refill() {
    auto ctr = base_;
    ctr[0] = block_index_++;
    const auto words = Philox4x32::block(ctr, key_);
    buffer_[0] = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    buffer_[1] = (static_cast<std::uint64_t>(words[2]) << 32) | words[3];
    buffered_ = 2;
}

double Substream::uniform_open() {
    if (buffered_ == 0) refill();
    const std::uint64_t bits = buffer_[--buffered_] >> 11;  // top 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Substream::uniform_half_open() {
    if (buffered_ == 0) refill();
    const std::uint64_t bits = buffer_[--buffered_] >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double Substream::normal() { return inverse_normal_cdf(uniform_open()); }

double inverse_normal_cdf(double u) {
    // AS241 (Wichura 1988), PPND16: max abs error ~1e-15 on (0,1).
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("inverse_normal_cdf: u outside (0,1)");
    const double q = u - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

CorrelatedIncrements correlated_increments(std::uint64_t master_seed, std::uint64_t path_index,
                                           std::size_t n, double dt, double rho) {
    if (!(dt > 0.0)) throw std::invalid_argument("correlated_increments: dt must be positive");
    Substream variance(master_seed, path_index, kStreamVarianceNoise);
    Substream orthogonal(master_seed, path_index, kStreamOrthogonalNoise);
    const double root_dt = std::sqrt(dt);
    const double ortho_scale = std::sqrt(1.0 - rho * rho);
    CorrelatedIncrements out;
    out.spot.resize(n);
    out.variance.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dwv = root_dt * variance.normal();
        out.variance[i] = dwv;
        out.spot[i] = rho * dwv + ortho_scale * root_dt * orthogonal.normal();
    }
    return out;
}

}  // namespace spdv::rng
