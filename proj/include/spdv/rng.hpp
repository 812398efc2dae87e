#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace spdv::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A block is a pure function of (counter, key), so any draw can be addressed
// directly and streams never need to be skipped or synchronised.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);
};

/// SplitMix64 finalizer; used to derive keys and decorrelate seed material.
std::uint64_t mix64(std::uint64_t z);

/// Deterministically combine a master seed with a stream tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// Substream identifiers within one path. Keeping the bridge uniforms on their
// own streams means enabling/disabling the bridge never shifts the Gaussians.
enum : std::uint32_t {
    kStreamVarianceNoise = 0,   // dW^v
    kStreamOrthogonalNoise = 1, // dW-perp for the spot leg
    kStreamBridgeUniform = 2,   // bridge maximum uniforms (primary / fine)
    kStreamBridgeUniformCoarse = 3, // bridge uniforms for the coarse leg of a coupled pair
};

// One addressable random stream, keyed by (seed, path_index, substream_id).
// Identical arguments always reproduce identical draws, independent of how
// paths are scheduled across workers.
class Substream {
public:
    Substream(std::uint64_t master_seed, std::uint64_t path_index, std::uint32_t substream_id);

    /// Uniform on the open interval (0,1); 53-bit resolution.
    double uniform_open();

    /// Uniform on (0,1]; never returns 0, safe under log().
    double uniform_half_open();

    /// Standard normal via inverse-CDF (keeps a 1:1 draw-to-counter mapping).
    double normal();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> base_;
    std::uint32_t block_index_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

/// Inverse standard normal CDF (Wichura's AS241, double precision).
double inverse_normal_cdf(double u);

/// Correlated Brownian increments over n uniform steps of size dt.
/// dWv is drawn first; dWs = rho*dWv + sqrt(1-rho^2)*dW_perp, so the variance
/// and spot legs share dWv no matter which variance scheme runs.
struct CorrelatedIncrements {
    std::vector<double> spot;     // dW^s
    std::vector<double> variance; // dW^v
};

CorrelatedIncrements correlated_increments(std::uint64_t master_seed, std::uint64_t path_index,
                                           std::size_t n, double dt, double rho);

}  // namespace spdv::rng
