#pragma once

#include "lppd/types.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <limits>
#include <new>
#include <vector>

namespace lppd {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// One bit per site of a w x h box in local coordinates (i,j): set when the
/// maximizing predecessor of (i,j) is (i-1,j), clear when it is (i,j-1) or
/// when (i,j) is the sweep origin. Bits are stored one anti-diagonal at a
/// time, each diagonal starting on a fresh 64-bit word.
class PredecessorField {
public:
    PredecessorField() = default;

    void reset(Coord w, Coord h) {
        w_ = w;
        h_ = h;
        const Coord diagonals = w + h - 1;
        try {
            offset_.assign(static_cast<std::size_t>(diagonals) + 1, 0);
            std::uint64_t total = 0;
            for (Coord d = 0; d < diagonals; ++d) {
                offset_[d] = total;
                total += static_cast<std::uint64_t>(diagonal_hi(d) - diagonal_lo(d)) / 64 + 1;
            }
            offset_[diagonals] = total;
            words_.assign(total, 0);
        } catch (const std::bad_alloc&) {
            throw ResourceError("out of memory allocating predecessor field");
        }
    }

    Coord width() const noexcept { return w_; }
    Coord height() const noexcept { return h_; }
    Coord diagonal_lo(Coord d) const noexcept { return std::max<Coord>(0, d - (h_ - 1)); }
    Coord diagonal_hi(Coord d) const noexcept { return std::min<Coord>(d, w_ - 1); }

    std::uint64_t* diagonal_words(Coord d) noexcept { return words_.data() + offset_[d]; }

    bool from_left(Coord i, Coord j) const noexcept {
        const Coord d = i + j;
        const auto k = static_cast<std::uint64_t>(i - diagonal_lo(d));
        return (words_[offset_[d] + k / 64] >> (k % 64)) & 1U;
    }

    std::size_t memory_bytes() const noexcept {
        return (words_.size() + offset_.size()) * sizeof(std::uint64_t);
    }

private:
    Coord w_ = 0;
    Coord h_ = 0;
    std::vector<std::uint64_t> offset_;
    std::vector<std::uint64_t> words_;
};

/// Start-exclusive last-passage sweep over a w x h box from local (0,0):
///   L(0,0) = 0,  L(i,j) = weight(i,j) + max(L(i-1,j), L(i,j-1)),
/// with sites outside the box at -inf. Ties go to the (i,j-1) predecessor.
///
/// After each anti-diagonal d the visitor is called as
/// visit(d, lo, hi, values) with values[i] = L(i, d-i) for i in [lo, hi].
/// If `bits` is non-null it receives the predecessor choice of every site.
template <class WeightFn, class Visitor>
void sweep(Coord w, Coord h, WeightFn&& weight, Visitor&& visit, PredecessorField* bits = nullptr) {
    if (w < 1 || h < 1) throw DomainError("sweep box must be non-empty");
    if (bits) bits->reset(w, h);

    // Index i lives at buffer slot i+1.
    std::vector<double> buf_a, buf_b;
    try {
        buf_a.assign(static_cast<std::size_t>(w) + 2, neg_inf);
        buf_b.assign(static_cast<std::size_t>(w) + 2, neg_inf);
    } catch (const std::bad_alloc&) {
        throw ResourceError("out of memory allocating sweep buffers");
    }
    std::vector<std::uint8_t> flags(bits ? static_cast<std::size_t>(w) + 64 : 0);
    double* prev = buf_a.data() + 1;
    double* cur = buf_b.data() + 1;

    cur[0] = 0.0;
    visit(Coord{0}, Coord{0}, Coord{0}, static_cast<const double*>(cur));
    std::swap(prev, cur);

    const Coord last = w + h - 2;
    for (Coord d = 1; d <= last; ++d) {
        const Coord lo = std::max<Coord>(0, d - (h - 1));
        const Coord hi = std::min<Coord>(d, w - 1);
        const double* p = prev;
        double* c = cur;
        for (Coord i = lo; i <= hi; ++i) {
            const double left = p[i - 1];
            const double down = p[i];
            c[i] = weight(i, d - i) + (left > down ? left : down);
        }
        if (bits) {
            const Coord count = hi - lo + 1;
            const double* q = p + lo;
            for (Coord k = 0; k < count; ++k) flags[k] = static_cast<std::uint8_t>(q[k - 1] > q[k]);
            for (Coord k = count; k % 64 != 0; ++k) flags[k] = 0;
            std::uint64_t* out = bits->diagonal_words(d);
            for (Coord k = 0; k * 64 < count; ++k) {
                std::uint64_t word = 0;
                for (int g = 0; g < 8; ++g) {
                    // Eight 0/1 bytes -> eight bits, byte t landing on bit t.
                    std::uint64_t bytes;
                    std::memcpy(&bytes, flags.data() + 64 * k + 8 * g, 8);
                    word |= ((bytes * 0x0102040810204080ULL) >> 56) << (8 * g);
                }
                out[k] = word;
            }
        }
        cur[lo - 1] = neg_inf;
        cur[hi + 1] = neg_inf;
        visit(d, lo, hi, static_cast<const double*>(cur));
        std::swap(prev, cur);
    }
}

/// Visitor that ignores every diagonal.
struct IgnoreDiagonals {
    void operator()(Coord, Coord, Coord, const double*) const noexcept {}
};

} // namespace lppd
