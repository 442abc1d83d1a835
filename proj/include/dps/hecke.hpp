#pragma once

#include <filesystem>
#include <map>
#include <numeric>
#include <thread>

#include "dps/charlat.hpp"
#include "dps/spill.hpp"
#include "dps/wgraph.hpp"

namespace dps {

struct singularity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ramified_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Element of H_0 in the T_w basis; keys are WeylTable indices.
struct HeckeVector {
  std::map<WeylTable::Index, Rat> terms;

  void add(WeylTable::Index y, const Rat& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms.emplace(y, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }
  friend bool operator==(const HeckeVector& a, const HeckeVector& b) { return a.terms == b.terms; }

  static HeckeVector unit(WeylTable::Index y = 0) {
    HeckeVector v;
    v.terms[y] = Rat(1);
    return v;
  }
  bool is_zero() const { return terms.empty(); }
};

// v * T_{s_i}: T_w T_s = T_{ws} when the length goes up, else
// q T_{ws} + (q-1) T_w.
inline HeckeVector right_mul_simple(const WeylTable& table, const HeckeVector& v, int i1, Rat q) {
  HeckeVector out;
  for (const auto& [y, c] : v.terms) {
    bool up;
    WeylTable::Index ys = table.mul_simple(y, i1, &up);
    if (up) {
      out.add(ys, c);
    } else {
      out.add(ys, c * q);
      out.add(y, c * (q - Rat(1)));
    }
  }
  return out;
}

// a * b by expanding b along reduced words of its basis terms.
inline HeckeVector hecke_mul(const WeylTable& table, const HeckeVector& a, const HeckeVector& b,
                             Rat q) {
  HeckeVector out;
  for (const auto& [y, c] : b.terms) {
    HeckeVector cur = a;
    for (int j : table.reduced_word(y)) cur = right_mul_simple(table, cur, j, q);
    for (const auto& [x, cx] : cur.terms) out.add(x, cx * c);
  }
  return out;
}

// One normalized-intertwiner factor: a T_e + b T_{s_root}, acting by right
// multiplication. z is the pairing the factor was evaluated at.
struct IntertwinerFactor {
  int root;
  std::int64_t z;
  Rat a, b;
};

// Coefficients ((q-1)/(q^{z+1}-1), (q^z-1)/(q^{z+1}-1)); z must be an
// integer pairing with trivial torsion, z = -1 is the pole.
inline IntertwinerFactor simple_intertwiner_factor(int root, const Coord& pairing_value, Rat q) {
  if (!pairing_value.tors.is_zero())
    throw ramified_error("intertwiner: ramified pairing at alpha_" + std::to_string(root));
  if (!pairing_value.re.is_integer())
    throw singularity_error("intertwiner: non-integer pairing z=" + pairing_value.re.str() +
                            " at alpha_" + std::to_string(root) +
                            "; exact q-power arithmetic needs integer z");
  std::int64_t z = pairing_value.re.num;
  Rat denom = rat_pow(q, z + 1) - Rat(1);
  if (denom.is_zero())
    throw singularity_error("intertwiner: pole (z = -1) at alpha_" + std::to_string(root));
  IntertwinerFactor f;
  f.root = root;
  f.z = z;
  f.a = (q - Rat(1)) / denom;
  f.b = (rat_pow(q, z) - Rat(1)) / denom;
  return f;
}

inline HeckeVector simple_intertwiner(const WeylTable& table, int root, const CharacterX& lam,
                                      Rat q) {
  Coord z;
  z.re = lam.coords[root - 1].re;
  z.tors = lam.coords[root - 1].tors;
  auto f = simple_intertwiner_factor(root, z, q);
  HeckeVector v;
  v.add(0, f.a);
  bool up;
  WeylTable::Index s = table.mul_simple(0, root, &up);
  v.add(s, f.b);
  return v;
}

// n_w(lambda) assembled along a reduced word of w. With operators realized
// by right multiplication, the cocycle N_{w1 w2} = N_{w1}(w2 l) N_{w2}(l)
// peels factors from the right end of the word: the element is
// n_{s_{il}}(l) n_{s_{il-1}}(s_{il} l) ... n_{s_{i1}}(s_{i2}...s_{il} l),
// and the returned factors are in right-multiplication application order.
inline std::vector<IntertwinerFactor> intertwiner_factors(const RootDatum& datum,
                                                          const std::vector<int>& word,
                                                          const CharacterX& lam, Rat q) {
  std::vector<IntertwinerFactor> factors;
  CharacterX cur = lam;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    Coord z = cur.coords[*it - 1];
    factors.push_back(simple_intertwiner_factor(*it, z, q));
    reflect_char(datum, *it, cur);
  }
  return factors;
}

inline HeckeVector apply_intertwiner_factors(const WeylTable& table, HeckeVector v,
                                             const std::vector<IntertwinerFactor>& factors,
                                             Rat q) {
  for (const auto& f : factors) {
    HeckeVector shifted = right_mul_simple(table, v, f.root, q);
    HeckeVector next;
    for (const auto& [y, c] : v.terms) next.add(y, c * f.a);
    for (const auto& [y, c] : shifted.terms) next.add(y, c * f.b);
    v = std::move(next);
  }
  return v;
}

inline HeckeVector word_intertwiner(const WeylTable& table, const std::vector<int>& word,
                                    const CharacterX& lam, Rat q) {
  auto factors = intertwiner_factors(*table.datum, word, lam, q);
  return apply_intertwiner_factors(table, HeckeVector::unit(), factors, q);
}

// Rows of the module H_P(Omega) hit by n_w: v_u = T_u triv n_w(lambda_0),
// u in W^{M,T}, streamed to spill storage.
struct ModuleRowSet {
  LeviSpec parabolic;
  DPSPoint point;
  std::vector<int> word;
  std::int64_t q = 2;
  CharacterX lambda0;
  std::filesystem::path dir;
  std::vector<std::uint64_t> row_keys;  // element key of u per row, in order
  std::size_t row_count = 0;
  std::size_t batch_rows = 256;

  std::size_t batches() const { return (row_count + batch_rows - 1) / batch_rows; }
  std::filesystem::path batch_path(std::size_t b) const {
    char name[32];
    std::snprintf(name, sizeof name, "rows_%06zu.bin", b);
    return dir / name;
  }
  std::filesystem::path manifest_path() const { return dir / "manifest.json"; }
};

namespace detail {

// Integer row engine: coefficients are kept as exact integers scaled by the
// running product of factor denominators, so no gcd work happens in the hot
// loop; entries are reduced once at spill time.
struct ScaledFactors {
  struct F {
    int root;
    std::int64_t na, nb, d;  // factor = (na + nb T_s)/d
  };
  std::vector<F> fs;
  std::int64_t denom = 1;  // product of d's

  static ScaledFactors from(const std::vector<IntertwinerFactor>& factors) {
    ScaledFactors out;
    for (const auto& f : factors) {
      if (f.a.den != f.b.den) {
        // bring to the common denominator of the pair
        std::int64_t d = std::lcm(f.a.den, f.b.den);
        out.fs.push_back({f.root, f.a.num * (d / f.a.den), f.b.num * (d / f.b.den), d});
      } else {
        out.fs.push_back({f.root, f.a.num, f.b.num, f.a.den});
      }
      out.denom = Rat::checked(static_cast<__int128>(out.denom) * out.fs.back().d);
    }
    return out;
  }
};

}  // namespace detail

inline ModuleRowSet module_rows(const WeylTable& table, const LeviSpec& theta_m,
                                const DPSPoint& p, const std::vector<int>& word, std::int64_t q,
                                const std::filesystem::path& dir, std::size_t batch_rows = 256,
                                int workers = 1) {
  const RootDatum& datum = *table.datum;
  if (p.k != 1)
    throw ramified_error("module_rows: ramified point (k > 1) is not supported");
  CharacterX lam0 = leading_exponent(datum, p);

  WeylElement w = datum.from_word(word);
  for (int j : theta_m.theta)
    if (w.sends_simple_negative(j))
      throw precondition_error("module_rows: w is not a minimal coset representative");

  auto factors = intertwiner_factors(datum, word, lam0, Rat(q));
  auto scaled = detail::ScaledFactors::from(factors);

  auto reps = min_double_coset_reps(datum, theta_m, LeviSpec{});
  ModuleRowSet rs;
  rs.parabolic = theta_m;
  rs.point = p;
  rs.word = word;
  rs.q = q;
  rs.lambda0 = lam0;
  rs.dir = dir;
  rs.row_count = reps.size();
  rs.batch_rows = batch_rows;
  std::filesystem::create_directories(dir);

  std::vector<WeylTable::Index> rep_idx(reps.size());
  for (std::size_t r = 0; r < reps.size(); ++r) rep_idx[r] = table.index_of(reps[r]);
  rs.row_keys.resize(reps.size());
  for (std::size_t r = 0; r < reps.size(); ++r) rs.row_keys[r] = table.key[rep_idx[r]];

  // Words of W_M, walked from each u to enumerate the coset u W_M.
  std::vector<std::vector<int>> levi_words;
  for (auto m : table.parabolic_elements(theta_m)) levi_words.push_back(table.reduced_word(m));

  CheckpointManifest manifest;
  manifest.point = {{"i", p.i}, {"s", p.s.str()}, {"k", p.k}};
  manifest.word = word;
  manifest.q = q;
  std::size_t resume_batch = 0;
  if (auto prev = CheckpointManifest::load(rs.manifest_path())) {
    if (prev->point == manifest.point && prev->word == word && prev->q == q) {
      resume_batch = prev->completed_rows / batch_rows;
      bool files_ok = true;
      for (std::size_t b = 0; b < resume_batch; ++b)
        if (!std::filesystem::exists(rs.batch_path(b))) files_ok = false;
      if (!files_ok) resume_batch = 0;
    }
  }

  const std::size_t n_rows = reps.size();

  // Per-worker scratch: dense coefficient buffers over the whole group.
  struct Scratch {
    std::vector<std::int64_t> dense, dense2;
    std::vector<WeylTable::Index> touched, touched2;
  };
  auto build_row = [&](Scratch& sc, std::size_t r, std::vector<spill::Term>& terms) {
    if (sc.dense.empty()) {
      sc.dense.assign(table.size(), 0);
      sc.dense2.assign(table.size(), 0);
    }
    sc.touched.clear();
    for (const auto& mw : levi_words) {
      WeylTable::Index x = rep_idx[r];
      for (int j : mw) x = table.mul_simple(x, j);
      if (sc.dense[x] == 0) sc.touched.push_back(x);
      sc.dense[x] += 1;  // T_u triv has unit coefficients on the coset
    }
    for (const auto& f : scaled.fs) {
      sc.touched2.clear();
      auto touch = [&](WeylTable::Index y, std::int64_t v) {
        if (v == 0) return;
        if (sc.dense2[y] == 0) sc.touched2.push_back(y);
        sc.dense2[y] += v;
      };
      for (WeylTable::Index x : sc.touched) {
        std::int64_t c = sc.dense[x];
        sc.dense[x] = 0;  // also dedupes revisits
        if (!c) continue;
        bool up;
        WeylTable::Index xs = table.mul_simple(x, f.root, &up);
        touch(x, c * f.na);
        if (up) {
          touch(xs, c * f.nb);
        } else {
          touch(xs, c * f.nb * q);
          touch(x, c * f.nb * (q - 1));
        }
      }
      std::swap(sc.dense, sc.dense2);
      std::swap(sc.touched, sc.touched2);
    }
    terms.clear();
    terms.reserve(sc.touched.size());
    for (WeylTable::Index x : sc.touched) {
      std::int64_t num = sc.dense[x];
      sc.dense[x] = 0;
      if (!num) continue;
      if (num > (std::int64_t(1) << 62) || num < -(std::int64_t(1) << 62))
        throw std::overflow_error("module_rows: coefficient overflow");
      std::int64_t g = std::gcd(num < 0 ? -num : num, scaled.denom);
      terms.push_back({table.key[x], num / g, scaled.denom / g});
    }
    std::sort(terms.begin(), terms.end(),
              [](const spill::Term& a, const spill::Term& b) { return a.key < b.key; });
  };

  int nw = std::max(1, workers);
  std::vector<Scratch> scratch(static_cast<std::size_t>(nw));
  for (std::size_t b = resume_batch; b * batch_rows < n_rows; ++b) {
    std::size_t lo = b * batch_rows, hi = std::min(n_rows, lo + batch_rows);
    std::vector<std::string> chunks(hi - lo);
    if (nw == 1) {
      std::vector<spill::Term> terms;
      for (std::size_t r = lo; r < hi; ++r) {
        build_row(scratch[0], r, terms);
        spill::write_row(chunks[r - lo], rs.row_keys[r], terms);
      }
    } else {
      std::vector<std::thread> threads;
      for (int t = 0; t < nw; ++t)
        threads.emplace_back([&, t] {
          std::vector<spill::Term> terms;
          for (std::size_t r = lo + static_cast<std::size_t>(t); r < hi;
               r += static_cast<std::size_t>(nw)) {
            build_row(scratch[static_cast<std::size_t>(t)], r, terms);
            spill::write_row(chunks[r - lo], rs.row_keys[r], terms);
          }
        });
      for (auto& th : threads) th.join();
    }
    // Single writer per file; rows concatenate in index order, so the bytes
    // do not depend on the worker count.
    std::string blob;
    for (auto& c : chunks) blob += c;
    spill::dump(rs.batch_path(b), blob);
    manifest.completed_rows = hi;
    manifest.save(rs.manifest_path());
  }
  return rs;
}

}  // namespace dps
