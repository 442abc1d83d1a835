#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <unordered_map>
#include <vector>

#include "dps/diagram.hpp"

namespace dps {

struct dimension_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using IVec = std::vector<std::int64_t>;

// Subset of simple roots, 1-based indices as in the tables.
struct LeviSpec {
  std::vector<int> theta;

  LeviSpec() = default;
  LeviSpec(std::initializer_list<int> l) : theta(l) { std::sort(theta.begin(), theta.end()); }
  explicit LeviSpec(std::vector<int> l) : theta(std::move(l)) { std::sort(theta.begin(), theta.end()); }

  static LeviSpec maximal(int rank, int i) {
    LeviSpec s;
    for (int j = 1; j <= rank; ++j)
      if (j != i) s.theta.push_back(j);
    return s;
  }
  static LeviSpec full(int rank) {
    LeviSpec s;
    for (int j = 1; j <= rank; ++j) s.theta.push_back(j);
    return s;
  }
  bool contains(int i) const { return std::binary_search(theta.begin(), theta.end(), i); }
};

class RootDatum;

// Weyl group element, stored as its action matrix on fundamental-weight
// coordinates. Equality and ordering go through the image of a fixed strictly
// dominant vector, which is injective on the group.
class WeylElement {
 public:
  const RootDatum* datum = nullptr;
  std::vector<std::int64_t> mat;  // n*n row-major: (w.c)_i = sum_j mat[i*n+j] c_j

  WeylElement() = default;
  WeylElement(const RootDatum* d, std::vector<std::int64_t> m) : datum(d), mat(std::move(m)) {}

  int rank() const;
  bool is_identity() const;

  IVec act(const IVec& v) const {
    int n = rank();
    if (static_cast<int>(v.size()) != n) throw dimension_error("WeylElement::act: rank mismatch");
    IVec out(n, 0);
    for (int i = 0; i < n; ++i) {
      std::int64_t s = 0;
      for (int j = 0; j < n; ++j) s += mat[i * n + j] * v[j];
      out[i] = s;
    }
    return out;
  }

  IVec canonical_key() const;

  friend bool operator==(const WeylElement& a, const WeylElement& b) { return a.mat == b.mat; }
  friend bool operator!=(const WeylElement& a, const WeylElement& b) { return !(a.mat == b.mat); }
  friend bool operator<(const WeylElement& a, const WeylElement& b) {
    return a.canonical_key() < b.canonical_key();
  }

  WeylElement operator*(const WeylElement& o) const {
    int n = rank();
    std::vector<std::int64_t> m(n * n, 0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        std::int64_t a = mat[i * n + k];
        if (!a) continue;
        for (int j = 0; j < n; ++j) m[i * n + j] += a * o.mat[k * n + j];
      }
    return WeylElement(datum, std::move(m));
  }

  WeylElement inverse() const;
  int length() const;
  std::vector<int> reduced_word() const;  // 1-based letters; w = s_{j1} * ... * s_{jl}

  // Sign of w(alpha_i), i 1-based: true iff w sends alpha_i to a negative root.
  bool sends_simple_negative(int i1) const;
};

class RootDatum {
 public:
  Diagram diagram;
  int n = 0;
  std::vector<std::int64_t> cartan;    // A[i][j] = <alpha_j, alpha_i^vee>, row-major
  std::vector<IVec> pos_root_coeffs;   // coefficients over simple roots, height-sorted
  std::vector<IVec> pos_root_weights;  // the same roots in weight coordinates

  std::int64_t a(int i, int j) const { return cartan[i * n + j]; }

  std::uint64_t weyl_order() const { return levi_weyl_order(LeviSpec::full(n)); }

  std::uint64_t levi_weyl_order(const LeviSpec& s) const {
    std::vector<int> t;
    for (int i : s.theta) t.push_back(i - 1);
    return parabolic_weyl_order(diagram, t);
  }

  WeylElement identity() const {
    std::vector<std::int64_t> m(n * n, 0);
    for (int i = 0; i < n; ++i) m[i * n + i] = 1;
    return WeylElement(this, std::move(m));
  }

  // s_i acting on weight coordinates: c -> c - c_i * A(:,i). 1-based i.
  WeylElement simple(int i1) const {
    int i = i1 - 1;
    auto w = identity();
    for (int r = 0; r < n; ++r) w.mat[r * n + i] -= a(r, i);
    return w;
  }

  WeylElement from_word(const std::vector<int>& word) const {
    WeylElement w = identity();
    for (int j : word) w = w * simple(j);
    return w;
  }

  // Weight coordinates of simple root alpha_i (1-based): column i of Cartan.
  IVec simple_root_weight(int i1) const {
    IVec v(n);
    for (int r = 0; r < n; ++r) v[r] = a(r, i1 - 1);
    return v;
  }

  // Apply s_i (1-based) to a weight-coordinate vector in place.
  void reflect_in_place(int i1, IVec& v) const {
    std::int64_t c = v[i1 - 1];
    if (!c) return;
    for (int r = 0; r < n; ++r) v[r] -= c * a(r, i1 - 1);
  }

  // Signed root id of a weight-coordinate vector: r+1 for positive root r,
  // -(r+1) for its negative, 0 if not a root.
  int root_id(const IVec& wt) const {
    auto it = root_lookup_.find(pack(wt));
    return it == root_lookup_.end() ? 0 : it->second;
  }

  std::size_t num_positive_roots() const { return pos_root_coeffs.size(); }

  // Strictly dominant integer vector with trivial stabilizer (canonical keys).
  IVec dominant_seed() const {
    IVec d(n);
    for (int i = 0; i < n; ++i) d[i] = i + 1;
    return d;
  }

  void finish();

 private:
  std::unordered_map<std::string, int> root_lookup_;

  static std::string pack(const IVec& v) {
    std::string s;
    s.reserve(v.size() * 3);
    for (auto x : v) {
      s += std::to_string(x);
      s += ',';
    }
    return s;
  }
};

inline void RootDatum::finish() {
  std::vector<IVec> roots;
  std::unordered_map<std::string, int> seen;
  for (int i = 0; i < n; ++i) {
    IVec c(n, 0);
    c[i] = 1;
    seen[pack(c)] = static_cast<int>(roots.size());
    roots.push_back(c);
  }
  // Reflection closure over root coefficients.
  for (std::size_t head = 0; head < roots.size(); ++head) {
    IVec cur = roots[head];
    for (int i = 0; i < n; ++i) {
      std::int64_t pair = 0;
      for (int j = 0; j < n; ++j) pair += a(i, j) * cur[j];
      IVec img = cur;
      img[i] -= pair;
      bool pos = std::all_of(img.begin(), img.end(), [](std::int64_t x) { return x >= 0; });
      if (!pos) continue;
      if (seen.emplace(pack(img), 0).second) roots.push_back(img);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const IVec& x, const IVec& y) {
    std::int64_t hx = 0, hy = 0;
    for (auto v : x) hx += v;
    for (auto v : y) hy += v;
    if (hx != hy) return hx < hy;
    return x < y;
  });
  pos_root_coeffs = roots;
  pos_root_weights.clear();
  root_lookup_.clear();
  for (std::size_t r = 0; r < roots.size(); ++r) {
    IVec wt(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) wt[i] += a(i, j) * roots[r][j];
    pos_root_weights.push_back(wt);
    root_lookup_[pack(wt)] = static_cast<int>(r) + 1;
    IVec neg(n);
    for (int i = 0; i < n; ++i) neg[i] = -wt[i];
    root_lookup_[pack(neg)] = -(static_cast<int>(r) + 1);
  }
}

inline std::shared_ptr<const RootDatum> build_root_datum(const std::string& label) {
  auto d = std::make_shared<RootDatum>();
  d->diagram = Diagram::make(label);
  d->n = d->diagram.rank;
  d->cartan.assign(static_cast<std::size_t>(d->n) * d->n, 0);
  for (int i = 0; i < d->n; ++i)
    for (int j = 0; j < d->n; ++j)
      d->cartan[i * d->n + j] = i == j ? 2 : d->diagram.adjacent(i, j) ? -1 : 0;
  d->finish();
  return d;
}

inline int WeylElement::rank() const { return datum->n; }

inline bool WeylElement::is_identity() const {
  int n = rank();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (mat[i * n + j] != (i == j ? 1 : 0)) return false;
  return true;
}

inline IVec WeylElement::canonical_key() const { return act(datum->dominant_seed()); }

inline bool WeylElement::sends_simple_negative(int i1) const {
  int id = datum->root_id(act(datum->simple_root_weight(i1)));
  if (id == 0) throw std::logic_error("Weyl action does not permute the roots");
  return id < 0;
}

inline int WeylElement::length() const {
  int l = 0;
  for (const auto& wt : datum->pos_root_weights)
    if (datum->root_id(act(wt)) < 0) ++l;
  return l;
}

inline std::vector<int> WeylElement::reduced_word() const {
  // Descent: while w != e pick the smallest i with w(alpha_i) < 0 and strip it
  // on the right. Then w = s_{jl} ... s_{j1} for the stripped letters j1..jl.
  std::vector<int> rev;
  WeylElement w = *this;
  while (!w.is_identity()) {
    int pick = 0;
    for (int i = 1; i <= rank(); ++i)
      if (w.sends_simple_negative(i)) {
        pick = i;
        break;
      }
    if (!pick) throw std::logic_error("descent not found on non-identity element");
    rev.push_back(pick);
    w = w * datum->simple(pick);
  }
  return std::vector<int>(rev.rbegin(), rev.rend());
}

inline WeylElement WeylElement::inverse() const {
  auto word = reduced_word();
  WeylElement w = datum->identity();
  for (auto it = word.rbegin(); it != word.rend(); ++it) w = w * datum->simple(*it);
  return w;
}

// W^{M,L} = { w : w(Phi^+_M) in Phi^+, w^{-1}(Phi^+_L) in Phi^+ }, the minimal
// double coset representatives, sorted by (length, canonical key).
//
// The group is never materialized: cosets wW_M correspond to the orbit of a
// dominant vector whose stabilizer is exactly W_M, explored breadth-first.
inline std::vector<WeylElement> min_double_coset_reps(const RootDatum& datum,
                                                      const LeviSpec& theta_m,
                                                      const LeviSpec& theta_l) {
  int n = datum.n;
  IVec x0(n);
  for (int i = 0; i < n; ++i) x0[i] = theta_m.contains(i + 1) ? 0 : i + 1;

  struct Node {
    IVec point;
    std::vector<int> word;  // w = s_{word[0]} ... s_{word[k-1]} applied to x0
  };
  auto pack = [](const IVec& v) {
    std::string s;
    for (auto x : v) {
      s += std::to_string(x);
      s += ',';
    }
    return s;
  };
  std::unordered_map<std::string, char> seen;
  std::deque<Node> queue;
  queue.push_back({x0, {}});
  seen[pack(x0)] = 1;
  std::vector<std::vector<int>> words;
  while (!queue.empty()) {
    Node cur = std::move(queue.front());
    queue.pop_front();
    words.push_back(cur.word);
    for (int i = 1; i <= n; ++i) {
      if (cur.point[i - 1] <= 0) continue;  // need <y, alpha_i^vee> > 0 to descend
      IVec next = cur.point;
      datum.reflect_in_place(i, next);
      auto key = pack(next);
      if (seen.emplace(key, 1).second) {
        std::vector<int> w{i};
        w.insert(w.end(), cur.word.begin(), cur.word.end());
        queue.push_back({std::move(next), std::move(w)});
      }
    }
  }

  std::vector<WeylElement> reps;
  reps.reserve(words.size());
  for (const auto& w : words) {
    WeylElement e = datum.from_word(w);
    if (!theta_l.theta.empty()) {
      WeylElement inv = e.inverse();
      bool ok = true;
      for (int j : theta_l.theta)
        if (inv.sends_simple_negative(j)) {
          ok = false;
          break;
        }
      if (!ok) continue;
    }
    reps.push_back(std::move(e));
  }
  std::sort(reps.begin(), reps.end(), [](const WeylElement& a, const WeylElement& b) {
    int la = a.length(), lb = b.length();
    if (la != lb) return la < lb;
    return a.canonical_key() < b.canonical_key();
  });
  return reps;
}

}  // namespace dps
