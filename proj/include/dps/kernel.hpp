#pragma once

#include <atomic>
#include <cstring>
#include <thread>
#include <unordered_set>

#include "dps/bigint.hpp"
#include "dps/hecke.hpp"
#include "dps/modp.hpp"

namespace dps {

enum class Certification { exact, modular_upper_bound_exact_nullvectors };

struct KernelReport {
  std::size_t dim = 0;         // |W^{M,T}| = number of rows
  std::size_t rank = 0;
  std::size_t kernel_dim = 0;  // dim - rank
  Certification certification = Certification::exact;
  std::uint64_t prime = 0;
  std::size_t primes_used = 1;
  std::size_t verified_null_vectors = 0;
  std::string strategy;
};

struct KernelConfig {
  std::uint64_t prime_seed = 0x5eed;
  std::size_t block_rows = 64;        // work-unit height for the elimination
  int workers = 1;
  std::size_t sketch_threshold = 2048;  // above this many rows, sketch first
  int sketch_density = 4;
  std::size_t n_buckets = 64;
  std::size_t max_primes = 256;
};

namespace kern {

// One exact matrix entry of Lambda^T: column u of the row set, at group
// element y.
struct Entry {
  std::uint64_t y_key;
  std::uint32_t u;
  std::int64_t num;
  std::int64_t den;
};

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream every entry of the row set through a callback.
template <typename F>
void for_each_entry(const ModuleRowSet& rows, F&& fn) {
  std::unordered_map<std::uint64_t, std::uint32_t> u_of;
  for (std::size_t r = 0; r < rows.row_keys.size(); ++r)
    u_of.emplace(rows.row_keys[r], static_cast<std::uint32_t>(r));
  for (std::size_t b = 0; b < rows.batches(); ++b) {
    std::string blob = spill::slurp(rows.batch_path(b));
    spill::Reader rd{reinterpret_cast<const std::uint8_t*>(blob.data()),
                     reinterpret_cast<const std::uint8_t*>(blob.data() + blob.size())};
    spill::Row row;
    while (spill::read_row(rd, row)) {
      std::uint32_t u = u_of.at(row.u_key);
      for (const auto& t : row.terms) fn(Entry{t.key, u, t.num, t.den});
    }
  }
}

// Scatter entries into per-bucket files ordered by a fixed hash of the
// column key, so the elimination can load one bucket at a time.
inline void bucket_pass(const ModuleRowSet& rows, const std::filesystem::path& dir,
                        std::size_t n_buckets) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> bufs(n_buckets);
  auto flush = [&](std::size_t i, bool final) {
    if (bufs[i].empty()) return;
    if (!final && bufs[i].size() < (1u << 22)) return;
    std::ofstream out(dir / ("bucket_" + std::to_string(i) + ".bin"),
                      std::ios::binary | std::ios::app);
    if (!out) throw storage_error("bucket pass: cannot append (resumable checkpoint kept)");
    out.write(bufs[i].data(), static_cast<std::streamsize>(bufs[i].size()));
    bufs[i].clear();
  };
  for (std::size_t i = 0; i < n_buckets; ++i) {
    std::error_code ec;
    std::filesystem::remove(dir / ("bucket_" + std::to_string(i) + ".bin"), ec);
  }
  for_each_entry(rows, [&](const Entry& e) {
    std::size_t b = static_cast<std::size_t>(mix64(e.y_key) % n_buckets);
    std::string& s = bufs[b];
    spill::put_u64(s, e.y_key);
    spill::put_u64(s, e.u);
    spill::put_signed_varint(s, e.num);
    spill::put_varint(s, static_cast<std::uint64_t>(e.den));
    flush(b, false);
  });
  for (std::size_t i = 0; i < n_buckets; ++i) flush(i, true);
}

struct BucketColumn {
  std::uint64_t y_key;
  std::vector<std::pair<std::uint32_t, std::pair<std::int64_t, std::int64_t>>> ents;  // (u,(num,den))
};

// Load one bucket and group it into columns sorted by key.
inline std::vector<BucketColumn> load_bucket(const std::filesystem::path& dir, std::size_t i) {
  std::vector<BucketColumn> cols;
  auto path = dir / ("bucket_" + std::to_string(i) + ".bin");
  if (!std::filesystem::exists(path)) return cols;
  std::string blob = spill::slurp(path);
  spill::Reader rd{reinterpret_cast<const std::uint8_t*>(blob.data()),
                   reinterpret_cast<const std::uint8_t*>(blob.data() + blob.size())};
  std::vector<Entry> entries;
  while (!rd.done()) {
    Entry e;
    e.y_key = rd.u64();
    e.u = static_cast<std::uint32_t>(rd.u64());
    e.num = rd.signed_varint();
    e.den = static_cast<std::int64_t>(rd.varint());
    entries.push_back(e);
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.y_key != b.y_key) return a.y_key < b.y_key;
    return a.u < b.u;
  });
  for (std::size_t k = 0; k < entries.size();) {
    BucketColumn c;
    c.y_key = entries[k].y_key;
    while (k < entries.size() && entries[k].y_key == c.y_key) {
      c.ents.push_back({entries[k].u, {entries[k].num, entries[k].den}});
      ++k;
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

// Streaming echelon over the rows of Lambda^T (columns of the row set),
// with dense pivot rows over the u-coordinates. Work units of block_rows
// columns are pre-reduced in parallel against the published pivots; the
// coordinator finalizes units in order, so the pivot set is independent of
// the worker count.
struct Echelon {
  Fp fp;
  std::size_t dim;
  std::vector<std::vector<std::uint64_t>> pivot_rows;  // normalized, lead coeff 1
  std::vector<std::int32_t> pivot_at;                  // coord -> pivot id or -1
  std::vector<std::uint32_t> pivot_coord;
  std::vector<std::uint64_t> pivot_key;                // column key that made the pivot

  Echelon(std::uint64_t p, std::size_t d) : fp{p}, dim(d), pivot_at(d, -1) {}

  std::size_t rank() const { return pivot_rows.size(); }

  // Reduce a dense vector against pivots with id < upto; returns first
  // nonzero coordinate or dim.
  std::size_t reduce(std::vector<std::uint64_t>& v, std::size_t upto) const {
    std::size_t lead = dim;
    for (std::size_t j = 0; j < dim; ++j) {
      if (!v[j]) continue;
      std::int32_t id = pivot_at[j];
      if (id < 0 || static_cast<std::size_t>(id) >= upto) {
        lead = j;
        break;
      }
      std::uint64_t f = fp.neg(v[j]);
      const auto& pr = pivot_rows[static_cast<std::size_t>(id)];
      for (std::size_t t = j; t < dim; ++t)
        if (pr[t]) v[t] = fp.add(v[t], fp.mul(f, pr[t]));
    }
    return lead;
  }

  // Finalize one column: full reduction, then publish a pivot if nonzero.
  void insert(std::vector<std::uint64_t>& v, std::uint64_t key) {
    for (;;) {
      std::size_t lead = reduce(v, pivot_rows.size());
      if (lead == dim) return;
      // claim the pivot
      std::uint64_t inv = fp.inv(v[lead]);
      for (std::size_t t = lead; t < dim; ++t)
        if (v[t]) v[t] = fp.mul(v[t], inv);
      pivot_at[lead] = static_cast<std::int32_t>(pivot_rows.size());
      pivot_coord.push_back(static_cast<std::uint32_t>(lead));
      pivot_key.push_back(key);
      pivot_rows.push_back(v);
      return;
    }
  }

  // Back-substitution to reduced echelon form (canonical null space).
  void make_rref() {
    for (std::size_t id = pivot_rows.size(); id-- > 0;) {
      std::size_t c = pivot_coord[id];
      for (std::size_t other = 0; other < pivot_rows.size(); ++other) {
        if (other == id) continue;
        auto& row = pivot_rows[other];
        if (!row[c]) continue;
        std::uint64_t f = fp.neg(row[c]);
        const auto& pr = pivot_rows[id];
        for (std::size_t t = c; t < dim; ++t)
          if (pr[t]) row[t] = fp.add(row[t], fp.mul(f, pr[t]));
      }
    }
  }
};

}  // namespace kern

// Exact values of selected columns of the row set: for each wanted key, the
// dense vector of rational entries over the rows.
inline std::vector<std::vector<Rat>> extract_columns(const ModuleRowSet& rows,
                                                     const std::vector<std::uint64_t>& keys) {
  std::unordered_map<std::uint64_t, std::size_t> pos;
  for (std::size_t i = 0; i < keys.size(); ++i) pos.emplace(keys[i], i);
  std::vector<std::vector<Rat>> out(keys.size(),
                                    std::vector<Rat>(rows.row_count, Rat(0)));
  kern::for_each_entry(rows, [&](const kern::Entry& e) {
    auto it = pos.find(e.y_key);
    if (it == pos.end()) return;
    out[it->second][e.u] = Rat(e.num, e.den);
  });
  return out;
}

// Rank and kernel of the span {v_u}. The modular pass gives rank(. mod p)
// <= rank over Q, hence a kernel upper bound; exact rational null vectors
// found by CRT over the pivot square system and verified against every
// column give the matching lower bound. A full-rank modular pass alone
// certifies kernel zero.
inline KernelReport kernel_dimension(const ModuleRowSet& rows, const KernelConfig& cfg = {}) {
  const std::size_t R = rows.row_count;
  std::mt19937_64 prng(cfg.prime_seed);
  const std::uint64_t p0 = random_prime31(prng);
  Fp fp{p0};

  KernelReport rep;
  rep.dim = R;
  rep.prime = p0;

  // Fast path for large modules: random sparse column sketch. rank(A S) <=
  // rank(A) always, so a full-rank sketch certifies injectivity by itself.
  if (R > cfg.sketch_threshold) {
    std::size_t C = R + 256;
    std::vector<std::vector<std::uint64_t>> Y(R, std::vector<std::uint64_t>(C, 0));
    kern::for_each_entry(rows, [&](const kern::Entry& e) {
      std::uint64_t val = fp.from_rat(e.num, e.den);
      std::uint64_t h = kern::mix64(e.y_key ^ cfg.prime_seed);
      for (int t = 0; t < cfg.sketch_density; ++t) {
        h = kern::mix64(h);
        std::size_t col = static_cast<std::size_t>(h % C);
        std::uint64_t coeff = (h >> 32) % p0;
        if (!coeff) coeff = 1;
        Y[e.u][col] = fp.add(Y[e.u][col], fp.mul(val, coeff));
      }
    });
    // dense row echelon, parallel over rows below the pivot
    std::size_t rank = 0;
    std::vector<std::size_t> perm(R);
    for (std::size_t i = 0; i < R; ++i) perm[i] = i;
    for (std::size_t c = 0; c < C && rank < R; ++c) {
      std::size_t sel = R;
      for (std::size_t r = rank; r < R; ++r)
        if (Y[perm[r]][c]) {
          sel = r;
          break;
        }
      if (sel == R) continue;
      std::swap(perm[rank], perm[sel]);
      const auto& prow = Y[perm[rank]];
      std::uint64_t inv = fp.inv(prow[c]);
      auto eliminate = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
          auto& row = Y[perm[r]];
          if (!row[c]) continue;
          std::uint64_t f = fp.neg(fp.mul(row[c], inv));
          for (std::size_t t = c; t < C; ++t)
            if (prow[t]) row[t] = fp.add(row[t], fp.mul(f, prow[t]));
        }
      };
      std::size_t lo = rank + 1;
      int nw = std::max(1, cfg.workers);
      if (nw > 1 && R - lo > 512) {
        std::vector<std::thread> threads;
        std::size_t chunk = (R - lo + nw - 1) / nw;
        for (int t = 0; t < nw; ++t) {
          std::size_t a = lo + t * chunk, b = std::min(R, a + chunk);
          if (a < b) threads.emplace_back(eliminate, a, b);
        }
        for (auto& th : threads) th.join();
      } else {
        eliminate(lo, R);
      }
      ++rank;
    }
    if (rank == R) {
      rep.rank = R;
      rep.kernel_dim = 0;
      rep.certification = Certification::exact;
      rep.strategy = "sketch";
      return rep;
    }
    // A rank-deficient sketch is only a hint; fall through to the exact
    // streaming echelon for the true modular rank.
  }

  // Bucketed transpose pass, then streaming echelon with published pivots.
  auto elim_dir = rows.dir / "elim";
  kern::bucket_pass(rows, elim_dir, cfg.n_buckets);
  auto manifest = CheckpointManifest::load(rows.manifest_path());
  kern::Echelon ech(p0, R);
  for (std::size_t b = 0; b < cfg.n_buckets; ++b) {
    if (manifest) {
      manifest->block_pass = static_cast<std::int64_t>(b);
      manifest->save(rows.manifest_path());
    }
    auto cols = kern::load_bucket(elim_dir, b);
    std::size_t nw = static_cast<std::size_t>(std::max(1, cfg.workers));
    for (std::size_t unit = 0; unit < cols.size(); unit += cfg.block_rows) {
      std::size_t hi = std::min(cols.size(), unit + cfg.block_rows);
      // pre-reduction against the pivots published so far (parallel, pure
      // speedup; finalization below is sequential and order-fixed)
      std::vector<std::vector<std::uint64_t>> reduced(hi - unit);
      std::size_t snapshot = ech.rank();
      auto prepare = [&](std::size_t lo_i, std::size_t hi_i) {
        for (std::size_t i = lo_i; i < hi_i; ++i) {
          auto& v = reduced[i - unit];
          v.assign(R, 0);
          for (const auto& [u, nd] : cols[i].ents)
            v[u] = fp.add(v[u], fp.from_rat(nd.first, nd.second));
          ech.reduce(v, snapshot);
        }
      };
      if (nw > 1 && hi - unit > 8) {
        std::vector<std::thread> threads;
        std::size_t chunk = (hi - unit + nw - 1) / nw;
        for (std::size_t t = 0; t < nw; ++t) {
          std::size_t a = unit + t * chunk, bb = std::min(hi, a + chunk);
          if (a < bb) threads.emplace_back(prepare, a, bb);
        }
        for (auto& th : threads) th.join();
      } else {
        prepare(unit, hi);
      }
      for (std::size_t i = unit; i < hi; ++i) ech.insert(reduced[i - unit], cols[i].y_key);
      if (ech.rank() == R) break;
    }
    if (ech.rank() == R) break;
  }

  rep.rank = ech.rank();
  rep.kernel_dim = R - rep.rank;
  rep.strategy = "echelon";
  if (rep.kernel_dim == 0) {
    rep.certification = Certification::exact;
    return rep;
  }

  // Canonical modular null basis from the reduced echelon form.
  ech.make_rref();
  std::vector<std::uint32_t> free_coords;
  for (std::size_t j = 0; j < R; ++j)
    if (ech.pivot_at[j] < 0) free_coords.push_back(static_cast<std::uint32_t>(j));

  // Exact square system on the pivot columns: S[a][b] = v_{p_b}(y_a).
  std::vector<std::uint64_t> keys = ech.pivot_key;
  auto cols_exact = extract_columns(rows, keys);
  const std::size_t r = rep.rank;
  std::vector<std::vector<Rat>> S(r, std::vector<Rat>(r));
  std::vector<std::vector<Rat>> B(r, std::vector<Rat>(free_coords.size()));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t bidx = 0; bidx < r; ++bidx) S[a][bidx] = cols_exact[a][ech.pivot_coord[bidx]];
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t f = 0; f < free_coords.size(); ++f)
      B[a][f] = cols_exact[a][free_coords[f]];

  // Multi-prime solve S x = -B, CRT and rational reconstruction per entry.
  std::size_t nf = free_coords.size();
  std::vector<std::vector<CrtAccumulator>> acc(nf, std::vector<CrtAccumulator>(r));
  std::vector<std::vector<Rat>> solution(nf, std::vector<Rat>(r));
  std::size_t primes_used = 0;
  bool reconstructed = false;
  std::vector<std::vector<std::pair<BigInt, BigInt>>> recon(
      nf, std::vector<std::pair<BigInt, BigInt>>(r));
  std::vector<std::vector<std::pair<BigInt, BigInt>>> prev = recon;
  std::unordered_set<std::uint64_t> used_primes;
  while (primes_used < cfg.max_primes && !reconstructed) {
    std::uint64_t p = primes_used == 0 ? p0 : random_prime31(prng);
    if (!used_primes.insert(p).second) continue;
    Fp f{p};
    // LU-style in-place elimination of [S | B] mod p
    std::vector<std::vector<std::uint64_t>> M(r, std::vector<std::uint64_t>(r + nf));
    bool bad = false;
    for (std::size_t a = 0; a < r && !bad; ++a) {
      for (std::size_t bidx = 0; bidx < r; ++bidx)
        M[a][bidx] = (S[a][bidx].den % static_cast<std::int64_t>(p)) == 0
                         ? (bad = true, 0)
                         : f.from_rat(S[a][bidx].num, S[a][bidx].den);
      for (std::size_t c = 0; c < nf; ++c)
        M[a][r + c] = (B[a][c].den % static_cast<std::int64_t>(p)) == 0
                          ? (bad = true, 0)
                          : f.neg(f.from_rat(B[a][c].num, B[a][c].den));
    }
    if (bad) continue;
    std::vector<std::size_t> where(r, 0);
    bool singular = false;
    std::vector<std::size_t> rperm(r);
    for (std::size_t a = 0; a < r; ++a) rperm[a] = a;
    for (std::size_t c = 0; c < r; ++c) {
      std::size_t sel = r;
      for (std::size_t a = c; a < r; ++a)
        if (M[rperm[a]][c]) {
          sel = a;
          break;
        }
      if (sel == r) {
        singular = true;
        break;
      }
      std::swap(rperm[c], rperm[sel]);
      auto& prow = M[rperm[c]];
      std::uint64_t inv = f.inv(prow[c]);
      for (std::size_t t = c; t < r + nf; ++t)
        if (prow[t]) prow[t] = f.mul(prow[t], inv);
      for (std::size_t a = 0; a < r; ++a) {
        if (a == c) continue;
        auto& row = M[rperm[a]];
        if (!row[c]) continue;
        std::uint64_t fac = f.neg(row[c]);
        for (std::size_t t = c; t < r + nf; ++t)
          if (prow[t]) row[t] = f.add(row[t], f.mul(fac, prow[t]));
      }
      where[c] = rperm[c];
    }
    if (singular) continue;  // unlucky prime
    for (std::size_t fi = 0; fi < nf; ++fi)
      for (std::size_t bidx = 0; bidx < r; ++bidx)
        acc[fi][bidx].add(M[where[bidx]][r + fi], p);
    ++primes_used;

    if (primes_used >= 2 && (primes_used & 1) == 0) {
      bool all_ok = true;
      for (std::size_t fi = 0; fi < nf && all_ok; ++fi)
        for (std::size_t bidx = 0; bidx < r && all_ok; ++bidx) {
          BigInt num, den;
          if (!rational_reconstruct(acc[fi][bidx].value, acc[fi][bidx].modulus, num, den)) {
            all_ok = false;
            break;
          }
          recon[fi][bidx] = {num, den};
        }
      if (all_ok && primes_used >= 4 && recon == prev) reconstructed = true;
      prev = recon;
    }
  }
  if (!reconstructed)
    throw std::runtime_error("kernel_dimension: null-vector reconstruction did not stabilize");

  // Exact verification: bring each candidate to an integer vector z (times a
  // common denominator) and check sum_u z_u v_u(y) = 0 for every column y.
  // Row entries contribute through the global denominator D, so each term is
  // a BigInt times a 128-bit integer scalar.
  std::int64_t D = 1;
  {
    // common denominator of all row entries: lcm over spill denominators
    std::unordered_set<std::int64_t> dens;
    kern::for_each_entry(rows, [&](const kern::Entry& e) { dens.insert(e.den); });
    for (auto d : dens) D = std::lcm(D, d);
  }
  std::vector<std::vector<BigInt>> z(nf, std::vector<BigInt>(R));
  for (std::size_t fi = 0; fi < nf; ++fi) {
    // common denominator of the reconstructed entries
    BigInt dc(1);
    for (std::size_t bidx = 0; bidx < r; ++bidx) {
      const BigInt& dgi = recon[fi][bidx].second;
      BigInt g = BigInt::gcd(dc, dgi), q, rr;
      BigInt::divmod(dc * dgi, g, q, rr);
      dc = q;
    }
    for (std::size_t bidx = 0; bidx < r; ++bidx) {
      BigInt q, rr;
      BigInt::divmod(dc, recon[fi][bidx].second, q, rr);
      z[fi][ech.pivot_coord[bidx]] = recon[fi][bidx].first * q;
    }
    z[fi][free_coords[fi]] = dc;
  }

  std::size_t verified = 0;
  {
    std::vector<bool> ok(nf, true);
    for (std::size_t b = 0; b < cfg.n_buckets; ++b) {
      auto cols = kern::load_bucket(elim_dir, b);
      for (const auto& col : cols) {
        for (std::size_t fi = 0; fi < nf; ++fi) {
          if (!ok[fi]) continue;
          BigInt acc_col;
          for (const auto& [u, nd] : col.ents) {
            if (z[fi][u].is_zero()) continue;
            // num*(D/den) is the original integer coefficient over the
            // common denominator, bounded by the spill-time check
            __int128 wide = static_cast<__int128>(nd.first) * (D / nd.second);
            acc_col.add_mul(z[fi][u], Rat::checked(wide));
          }
          if (!acc_col.is_zero()) ok[fi] = false;
        }
      }
    }
    for (std::size_t fi = 0; fi < nf; ++fi)
      if (ok[fi]) ++verified;
  }
  if (verified != rep.kernel_dim)
    throw std::runtime_error(
        "kernel_dimension: exact verification matched " + std::to_string(verified) + " of " +
        std::to_string(rep.kernel_dim) + " modular null vectors; certification failed");
  rep.primes_used = primes_used;
  rep.verified_null_vectors = verified;
  rep.certification = Certification::modular_upper_bound_exact_nullvectors;
  return rep;
}

}  // namespace dps
