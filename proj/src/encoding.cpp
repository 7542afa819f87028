#include "esqubo/encoding.hpp"

#include <cmath>
#include <stdexcept>

namespace esqubo::encoding {

Encoding::Encoding(int n_assets, int bits_per_weight)
    : n_assets(n_assets), bits_per_weight(bits_per_weight) {
    if (n_assets < 1) throw std::invalid_argument("encoding needs at least one asset");
    if (bits_per_weight < 1 || bits_per_weight > 32)
        throw std::invalid_argument("bits per weight must lie in [1, 32]");
}

Eigen::VectorXd decode(const Encoding& enc, const BitVector& x) {
    if (x.size() != static_cast<std::size_t>(enc.total_bits()))
        throw std::invalid_argument("bit vector length does not match the encoding");
    Eigen::VectorXd w(enc.n_assets);
    for (int i = 0; i < enc.n_assets; ++i) {
        double acc = 0.0;
        for (int j = 1; j <= enc.bits_per_weight; ++j) {
            if (x[static_cast<std::size_t>(i * enc.bits_per_weight + j - 1)])
                acc += std::ldexp(1.0, -j);
        }
        w(i) = acc;
    }
    return w;
}

BitVector encode_nearest(const Encoding& enc, const Eigen::VectorXd& w) {
    if (w.size() != enc.n_assets)
        throw std::invalid_argument("weight vector length does not match the encoding");
    const int bits = enc.bits_per_weight;
    const long max_level = (1L << bits) - 1;
    BitVector x(static_cast<std::size_t>(enc.total_bits()), 0);
    for (int i = 0; i < enc.n_assets; ++i) {
        if (!(w(i) >= 0.0 && w(i) < 1.0))
            throw std::invalid_argument("weights must lie in [0, 1)");
        // nearest integer level with half-way cases rounded down
        double scaled = std::ldexp(w(i), bits);
        long m = static_cast<long>(std::ceil(scaled - 0.5));
        if (m < 0) m = 0;
        if (m > max_level) m = max_level;
        for (int j = 1; j <= bits; ++j)
            x[static_cast<std::size_t>(i * bits + j - 1)] =
                static_cast<std::uint8_t>((m >> (bits - j)) & 1L);
    }
    return x;
}

std::string to_bit_string(const BitVector& x) {
    std::string s(x.size(), '0');
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k]) s[k] = '1';
    return s;
}

}  // namespace esqubo::encoding
