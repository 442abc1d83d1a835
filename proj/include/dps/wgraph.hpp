#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dps/rootsys.hpp"

namespace dps {

// The whole Weyl group, enumerated once for Hecke-module work. Element y is
// represented by the vector y^{-1}.d (d the dominant seed): right
// multiplication by s_i becomes a left application of the fixed reflection,
// and the sign of coordinate i tells whether the length goes up. The packed
// vector doubles as a stable 8-byte element key that does not depend on the
// enumeration order.
class WeylTable {
 public:
  using Index = std::uint32_t;
  static constexpr Index npos = ~Index(0);
  static constexpr std::uint32_t kLenUpBit = 0x80000000u;

  const RootDatum* datum;
  std::vector<std::uint64_t> key;      // packed int8 coordinates of y^{-1}.d
  std::vector<std::uint32_t> right;    // [y*n + i]: index of y*s_{i+1}, bit 31 = length up
  std::vector<std::uint8_t> length;

  explicit WeylTable(const RootDatum& d) : datum(&d) {
    int n = d.n;
    if (n > 8) throw config_error("WeylTable: rank > 8 not supported");
    IVec seed = d.dominant_seed();
    std::vector<std::array<std::int8_t, 8>> vecs;
    auto pack = [&](const std::array<std::int8_t, 8>& v) {
      std::uint64_t k = 0;
      for (int i = 0; i < 8; ++i) k |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(v[i])) << (8 * i);
      return k;
    };
    std::array<std::int8_t, 8> v0{};
    for (int i = 0; i < n; ++i) {
      if (seed[i] > 127) throw config_error("WeylTable: seed out of int8 range");
      v0[i] = static_cast<std::int8_t>(seed[i]);
    }
    vecs.push_back(v0);
    index_.reserve(static_cast<std::size_t>(d.weyl_order()) * 2);
    index_.emplace(pack(v0), 0);
    length.push_back(0);

    for (std::size_t head = 0; head < vecs.size(); ++head) {
      auto cur = vecs[head];
      for (int i = 0; i < n; ++i) {
        // u_{y s_i} = s_i . u_y; coordinate ranges stay within int8 because
        // the orbit of d pairs with coroots boundedly (checked).
        std::array<std::int8_t, 8> img = cur;
        std::int32_t ci = cur[i];
        if (ci != 0) {
          for (int r = 0; r < n; ++r) {
            std::int32_t x = img[r] - ci * static_cast<std::int32_t>(d.a(r, i));
            if (x < -128 || x > 127) throw config_error("WeylTable: coordinate overflow");
            img[r] = static_cast<std::int8_t>(x);
          }
        }
        auto k = pack(img);
        auto it = index_.find(k);
        if (it == index_.end()) {
          it = index_.emplace(k, static_cast<Index>(vecs.size())).first;
          vecs.push_back(img);
          length.push_back(static_cast<std::uint8_t>(length[head] + 1));
        }
      }
    }

    std::size_t m = vecs.size();
    key.resize(m);
    for (std::size_t y = 0; y < m; ++y) key[y] = pack(vecs[y]);
    right.assign(m * n, 0);
    for (std::size_t y = 0; y < m; ++y) {
      auto cur = vecs[y];
      for (int i = 0; i < n; ++i) {
        bool up = cur[i] > 0;  // <y^{-1}d, alpha_i^vee> > 0  <=>  l(y s_i) > l(y)
        std::array<std::int8_t, 8> img = cur;
        std::int32_t ci = cur[i];
        if (ci != 0)
          for (int r = 0; r < n; ++r)
            img[r] = static_cast<std::int8_t>(img[r] - ci * static_cast<std::int32_t>(d.a(r, i)));
        Index to = index_.at(pack(img));
        right[y * n + i] = to | (up ? kLenUpBit : 0);
      }
    }
  }

  std::size_t size() const { return key.size(); }
  int rank() const { return datum->n; }

  Index mul_simple(Index y, int i1, bool* len_up = nullptr) const {
    std::uint32_t e = right[static_cast<std::size_t>(y) * rank() + (i1 - 1)];
    if (len_up) *len_up = (e & kLenUpBit) != 0;
    return e & ~kLenUpBit;
  }

  Index index_of_key(std::uint64_t k) const {
    auto it = index_.find(k);
    return it == index_.end() ? npos : it->second;
  }

  // Index of a WeylElement from rootsys.
  Index index_of(const WeylElement& w) const {
    Index y = 0;
    for (int j : w.reduced_word()) y = mul_simple(y, j);
    return y;
  }

  std::vector<int> reduced_word(Index y) const {
    std::vector<int> rev;
    while (length[y] != 0) {
      for (int i = 1; i <= rank(); ++i) {
        bool up;
        Index t = mul_simple(y, i, &up);
        if (!up) {
          rev.push_back(i);
          y = t;
          break;
        }
      }
    }
    return std::vector<int>(rev.rbegin(), rev.rend());
  }

  // Elements of the parabolic subgroup W_Theta, by closure.
  std::vector<Index> parabolic_elements(const LeviSpec& theta) const {
    std::vector<Index> out{0};
    std::unordered_map<Index, char> seen{{0, 1}};
    for (std::size_t h = 0; h < out.size(); ++h)
      for (int i : theta.theta) {
        Index t = mul_simple(out[h], i);
        if (seen.emplace(t, 1).second) out.push_back(t);
      }
    return out;
  }

 private:
  std::unordered_map<std::uint64_t, Index> index_;
};

}  // namespace dps
