#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace esqubo::encoding {

/// Flat 0/1 variable assignment, asset-major: variable (i,j) lives at
/// index i*B + (j-1) for asset i in [0,N) and bit significance j in [1,B].
using BitVector = std::vector<std::uint8_t>;

/// Fixed-point map between binary variables and fractional asset weights.
/// Each asset weight uses B bits: w = m * 2^-B for m in {0, ..., 2^B - 1},
/// so w is confined to [0, 1 - 2^-B] and can never reach 1 or go negative.
struct Encoding {
    int n_assets;
    int bits_per_weight;

    Encoding(int n_assets, int bits_per_weight);

    int total_bits() const { return n_assets * bits_per_weight; }
};

/// w_i = sum_{j=1..B} 2^-j * x[i*B + j - 1].
Eigen::VectorXd decode(const Encoding& enc, const BitVector& x);

/// Bits whose decode is the grid point nearest to w, ties toward the
/// smaller grid value. Exact inverse of decode for on-grid weights.
BitVector encode_nearest(const Encoding& enc, const Eigen::VectorXd& w);

/// "0101..." in asset-major order, for JSON output.
std::string to_bit_string(const BitVector& x);

}  // namespace esqubo::encoding
