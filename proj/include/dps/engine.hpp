#pragma once

#include <chrono>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "dps/branch.hpp"
#include "dps/classify.hpp"
#include "dps/kernel.hpp"

namespace dps {

using json = nlohmann::json;

struct assertion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline json char_to_json(const CharacterX& c) {
  json a = json::array();
  for (const auto& co : c.coords) a.push_back({{"re", co.re.str()}, {"tors", co.tors.str()}});
  return a;
}

inline CharacterX char_from_json(const json& a) {
  CharacterX c(static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_array() || a[i].is_number() || a[i].is_string()) {
      // compact form: plain rational (real part only)
      c.coords[i].re = Rat::parse(a[i].is_string() ? a[i].get<std::string>()
                                                   : std::to_string(a[i].get<std::int64_t>()));
    } else {
      c.coords[i].re = Rat::parse(a[i].at("re").get<std::string>());
      c.coords[i].tors = Rat::parse(a[i].at("tors").get<std::string>()).mod1();
    }
  }
  return c;
}

inline json expfun_to_json(const ExponentFunction& f) {
  json a = json::array();
  for (const auto& [k, v] : f.entries())
    a.push_back({{"character", char_to_json(v.first)}, {"multiplicity", v.second}});
  return a;
}

// Runtime configuration: flat key=value file, environment overrides with the
// DPS_ prefix.
struct RunConfig {
  std::string datum_label = "E7";
  std::filesystem::path cache_dir = ".dps-cache";
  std::filesystem::path data_dir = "data";
  std::int64_t q = 2;
  std::uint64_t prime_seed = 0x5eed;
  int workers = 1;
  std::size_t block_rows = 64;

  static RunConfig load(const std::filesystem::path& file = {}) {
    RunConfig cfg;
    if (!file.empty() && std::filesystem::exists(file)) {
      std::ifstream in(file);
      std::string line;
      while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos || line.empty() || line[0] == '#') continue;
        cfg.set(line.substr(0, eq), line.substr(eq + 1));
      }
    }
    for (const char* key : {"DATUM", "CACHE_DIR", "DATA_DIR", "Q", "PRIME_SEED", "WORKERS",
                            "BLOCK_ROWS"}) {
      std::string env = std::string("DPS_") + key;
      if (const char* v = std::getenv(env.c_str())) cfg.set(key, v);
    }
    return cfg;
  }

  void set(std::string key, const std::string& value) {
    for (auto& ch : key) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (key == "DATUM") datum_label = value;
    else if (key == "CACHE_DIR") cache_dir = value;
    else if (key == "DATA_DIR") data_dir = value;
    else if (key == "Q") q = std::stoll(value);
    else if (key == "PRIME_SEED") prime_seed = std::stoull(value);
    else if (key == "WORKERS") workers = std::stoi(value);
    else if (key == "BLOCK_ROWS") block_rows = static_cast<std::size_t>(std::stoull(value));
    else throw config_error("unknown config key: " + key);
    if (q < 2) throw config_error("q must be at least 2");
    if (workers < 1) throw config_error("workers must be at least 1");
  }
};

struct VerdictRow {
  int i = 0;
  Rat s;
  std::int64_t k = 1;
  Regularity regularity = Regularity::regular;
  Verdict verdict = Verdict::inconclusive;
  std::string method;    // REG3 | tadic | saturation | proof-script | expected-from-paper | ...
  std::string evidence;  // machine-checkable witness or paper citation

  json to_json() const {
    return {{"i", i},           {"s", s.str()},
            {"k", k},           {"regularity", to_string(regularity)},
            {"verdict", to_string(verdict)}, {"method", method},
            {"evidence", evidence}};
  }
};

// Long-lived computation context for one datum.
class Engine {
 public:
  RunConfig cfg;
  std::shared_ptr<const RootDatum> datum;
  RuleContext rules;

  explicit Engine(RunConfig c)
      : cfg(std::move(c)), datum(build_root_datum(cfg.datum_label)), rules(*datum) {
    std::filesystem::create_directories(cfg.cache_dir);
    load_data();
  }

  const std::vector<WeylElement>& coset_reps(int i) {
    auto it = reps_.find(i);
    if (it == reps_.end())
      it = reps_.emplace(i, min_double_coset_reps(*datum, LeviSpec::maximal(datum->n, i), LeviSpec{}))
               .first;
    return it->second;
  }

  ExponentFunction exponents(const DPSPoint& p) {
    return dps_exponents(*datum, LeviSpec::maximal(datum->n, p.i), leading_exponent(*datum, p),
                         &coset_reps(p.i), cfg.workers);
  }

  std::optional<CandidateSpec> candidate_for(int i, const Rat& s, std::int64_t k) const {
    auto it = candidates_.find(point_key(i, s, k));
    if (it == candidates_.end()) return std::nullopt;
    return it->second;
  }

  struct ProseEntry {
    Verdict verdict;
    std::string citation;
    std::string script;  // optional machine route
  };
  std::optional<ProseEntry> prose_for(int i, const Rat& s, std::int64_t k) const {
    auto it = prose_.find(point_key(i, s, k));
    if (it == prose_.end()) return std::nullopt;
    return it->second;
  }

  // Classification pipeline for one (i, k) table row.
  std::vector<VerdictRow> run_classification(int i, std::int64_t k) {
    std::vector<VerdictRow> rows;
    for (const auto& sp : enumerate_special_points(*datum, i, k)) {
      VerdictRow row;
      row.i = i;
      row.s = sp.s;
      row.k = k;
      DPSPoint p{i, sp.s, k};
      if (sp.cls == SpecialClass::regular_reducible) {
        row.regularity = Regularity::regular;
        row.verdict = Verdict::reducible_regular;
        row.method = "REG3";
        auto rr = regular_reducibility(*datum, p);
        std::ostringstream ev;
        ev << "pairing +-1 at positive root #" << *rr.witness_root;
        row.evidence = ev.str();
        rows.push_back(row);
        continue;
      }
      row.regularity = Regularity::non_regular;
      ExponentFunction f_pi = exponents(p);

      if (auto cand = candidate_for(i, sp.s, k)) {
        auto res = tadic_test(*datum, p, *cand, &f_pi);
        if (res.outcome == TadicOutcome::reducible_confirmed) {
          row.verdict = Verdict::reducible;
          row.method = "tadic";
          std::ostringstream ev;
          ev << "sigma=" << cand->str() << " witness mu=" << res.witness_mu->str() << " mult "
             << res.mult_pi << ">" << res.mult_sigma;
          row.evidence = ev.str();
          rows.push_back(row);
          continue;
        }
      }
      if (check_irreducible(*datum, p, rules, nullptr, &f_pi) == Irreducibility::irreducible) {
        row.verdict = Verdict::irreducible;
        row.method = "saturation";
        row.evidence = "single-seed saturation reaches the full exponent function";
        rows.push_back(row);
        continue;
      }
      if (auto pr = prose_for(i, sp.s, k)) {
        if (!pr->script.empty()) {
          auto cached = script_cache(pr->script);
          if (cached && (*cached)["ok"].get<bool>()) {
            row.verdict = pr->verdict;
            row.method = "proof-script";
            row.evidence = pr->script + " (replayed)";
            rows.push_back(row);
            continue;
          }
        }
        row.verdict = pr->verdict;
        row.method = "expected-from-paper";
        row.evidence = pr->citation;
        rows.push_back(row);
        continue;
      }
      row.verdict = Verdict::inconclusive;
      row.method = "no-candidate";
      row.evidence = "no comparison candidate configured for this point";
      rows.push_back(row);
    }
    return rows;
  }

  // Advisory lock around cache writes: an atomically created directory,
  // removed on release. Stale locks older than an hour are broken.
  struct CacheLock {
    std::filesystem::path dir;
    explicit CacheLock(const std::filesystem::path& cache_dir) : dir(cache_dir / ".lock") {
      using namespace std::chrono_literals;
      for (int attempt = 0;; ++attempt) {
        std::error_code ec;
        if (std::filesystem::create_directory(dir, ec)) return;
        auto age = std::filesystem::exists(dir)
                       ? std::filesystem::file_time_type::clock::now() -
                             std::filesystem::last_write_time(dir, ec)
                       : std::filesystem::file_time_type::duration::zero();
        if (age > 1h) {
          std::filesystem::remove(dir, ec);
          continue;
        }
        if (attempt > 600) throw storage_error("cache lock held too long: " + dir.string());
        std::this_thread::sleep_for(100ms);
      }
    }
    ~CacheLock() {
      std::error_code ec;
      std::filesystem::remove(dir, ec);
    }
  };

  // Cached, deterministic classification JSON.
  json classify_cached(int i, std::int64_t k, bool refresh = false) {
    auto path = cfg.cache_dir / ("classify_i" + std::to_string(i) + "_k" + std::to_string(k) +
                                 ".json");
    if (!refresh && std::filesystem::exists(path)) return json::parse(spill::slurp(path));
    CacheLock lock(cfg.cache_dir);
    if (!refresh && std::filesystem::exists(path)) return json::parse(spill::slurp(path));
    auto rows = run_classification(i, k);
    json out = json::array();
    for (const auto& r : rows) out.push_back(r.to_json());
    spill::dump(path, out.dump(2) + "\n");
    return out;
  }

  std::optional<json> script_cache(const std::string& name) const {
    auto path = cfg.cache_dir / ("script_" + name + ".json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    return json::parse(spill::slurp(path));
  }

  static std::string point_key(int i, const Rat& s, std::int64_t k) {
    return std::to_string(i) + "|" + s.str() + "|" + std::to_string(k);
  }

 private:
  std::map<int, std::vector<WeylElement>> reps_;
  std::map<std::string, CandidateSpec> candidates_;
  std::map<std::string, ProseEntry> prose_;

  void load_data() {
    auto cand_path = cfg.data_dir / "candidates.json";
    if (std::filesystem::exists(cand_path)) {
      json j = json::parse(spill::slurp(cand_path));
      for (const auto& e : j.at("candidates")) {
        int i = e.at("i").get<int>();
        Rat s = Rat::parse(e.at("s").get<std::string>());
        std::int64_t k = e.at("k").get<std::int64_t>();
        const auto& sig = e.at("sigma");
        CandidateSpec spec;
        if (sig.at("type") == "corank1") {
          spec = CandidateSpec::corank1(sig.at("j").get<int>(),
                                        Rat::parse(sig.at("t").get<std::string>()),
                                        sig.at("k").get<std::int64_t>());
        } else if (sig.at("type") == "corank2") {
          spec = CandidateSpec::corank2(
              sig.at("j")[0].get<int>(), sig.at("j")[1].get<int>(),
              Rat::parse(sig.at("s")[0].get<std::string>()),
              Rat::parse(sig.at("s")[1].get<std::string>()), sig.at("e")[0].get<std::int64_t>(),
              sig.at("e")[1].get<std::int64_t>(), k);
        } else {
          throw config_error("candidates.json: unknown sigma type");
        }
        candidates_.emplace(point_key(i, s, k), std::move(spec));
      }
    }
    auto prose_path = cfg.data_dir / "prose_verdicts.json";
    if (std::filesystem::exists(prose_path)) {
      json j = json::parse(spill::slurp(prose_path));
      for (const auto& e : j.at("verdicts")) {
        ProseEntry pe;
        std::string v = e.at("verdict").get<std::string>();
        pe.verdict = v == "irreducible" ? Verdict::irreducible : Verdict::reducible;
        pe.citation = e.at("citation").get<std::string>();
        if (e.contains("script")) pe.script = e.at("script").get<std::string>();
        prose_.emplace(point_key(e.at("i").get<int>(), Rat::parse(e.at("s").get<std::string>()),
                                 e.at("k").get<std::int64_t>()),
                       pe);
      }
    }
  }
};

// Search for a shortest coset representative w such that the single-seed
// saturation already pins the full multiplicity at w . lambda_0: along such a
// w the normalized intertwiner is holomorphic and nonzero, and the kernel
// computation is as small as the saturation data allows. An explicitly
// configured word always takes precedence over this heuristic.
inline std::optional<std::vector<int>> suggest_intertwiner_word(Engine& eng, const DPSPoint& p) {
  const RootDatum& datum = *eng.datum;
  CharacterX lam0 = leading_exponent(datum, p);
  ExponentFunction f_pi = eng.exponents(p);
  ExponentFunction f0;
  f0.add(antidominant_form(datum, lam0), 1);
  auto st = saturate(f0, f_pi, eng.rules);
  const WeylElement* best = nullptr;
  for (const auto& u : eng.coset_reps(p.i)) {
    if (u.is_identity()) continue;
    CharacterX mu = weyl_act(u, lam0);
    std::int64_t full = f_pi.mult(mu);
    if (full != 0 && st.f.mult(mu) == full) {
      if (!best || u.length() < best->length()) best = &u;
    }
  }
  if (!best) return std::nullopt;
  return best->reduced_word();
}

// ---------------------------------------------------------------------------
// Proof-script replay.

struct ReplayStep {
  std::string description;
  bool ok = true;
  bool skipped = false;
  std::int64_t value = 0;
};

struct ReplayResult {
  std::string name;
  std::vector<ReplayStep> steps;
  bool ok = true;
  bool complete = true;  // false when heavy steps were skipped
};

// Executes a proof script: seeds, rule applications asserted row by row
// against their recorded multiplicities, saturation passes, and Hecke kernel
// delegations. Fails loudly (assertion_error) on any multiplicity mismatch.
inline ReplayResult replay_proof_script(Engine& eng, const std::string& name,
                                        bool allow_heavy = false) {
  auto path = eng.cfg.data_dir / "scripts" / (name + ".json");
  if (!std::filesystem::exists(path)) throw config_error("no such proof script: " + name);
  json script = json::parse(spill::slurp(path));

  ReplayResult result;
  result.name = name;
  const RootDatum& datum = *eng.datum;

  DPSPoint p;
  ExponentFunction f_pi;
  SaturationState st;
  bool have_point = false;

  auto describe = [&](const json& step) {
    std::ostringstream os;
    os << step.at("op").get<std::string>();
    if (step.contains("rule")) os << " " << step.at("rule").get<std::string>();
    if (step.contains("l")) os << " -> " << step.at("l").get<std::int64_t>();
    return os.str();
  };
  auto fail = [&](const json& step, const std::string& why) {
    result.ok = false;
    throw assertion_error("script " + name + " step '" + describe(step) + "': " + why);
  };

  for (const auto& step : script.at("steps")) {
    std::string op = step.at("op").get<std::string>();
    ReplayStep rs;
    rs.description = describe(step);

    if (op == "point") {
      p = DPSPoint{step.at("i").get<int>(), Rat::parse(step.at("s").get<std::string>()),
                   step.at("k").get<std::int64_t>()};
      f_pi = eng.exponents(p);
      st = SaturationState{};
      have_point = true;
    } else if (op == "reset") {
      st = SaturationState{};
    } else if (op == "seed") {
      CharacterX at = char_from_json(step.at("at"));
      std::int64_t v = step.at("value").get<std::int64_t>();
      if (!have_point) fail(step, "seed before point");
      if (v > f_pi.mult(at)) fail(step, "seed exceeds f_pi");
      st.f.set(at, v);
    } else if (op == "apply" || op == "a1chain") {
      if (!have_point) fail(step, "apply before point");
      CharacterX lam = char_from_json(step.at("lambda"));
      CharacterX mu = char_from_json(step.at("mu"));
      std::int64_t expect_in = step.value("kin", st.f.mult(lam));
      if (st.f.mult(lam) != expect_in)
        fail(step, "input multiplicity " + std::to_string(st.f.mult(lam)) + " expected " +
                       std::to_string(expect_in));
      std::string rule_name = op == "a1chain" ? "A1" : step.at("rule").get<std::string>();
      const BranchRule* rule = nullptr;
      for (const auto& r : eng.rules.rules)
        if (r.name == rule_name) rule = &r;
      if (!rule) fail(step, "unknown rule " + rule_name);

      if (op == "a1chain") {
        std::vector<int> word = step.at("word").get<std::vector<int>>();
        CharacterX cur = lam;
        for (auto it = word.rbegin(); it != word.rend(); ++it) {
          auto res = apply_triple(st, cur, {*it}, *rule, f_pi, datum);
          if (!res.applicable) fail(step, "A1 guard failed at alpha_" + std::to_string(*it));
          reflect_char(datum, *it, cur);
        }
        if (!(cur == mu)) fail(step, "A1 chain does not land on mu");
      } else if (rule->kind == RuleKind::OR) {
        auto res = apply_triple(st, lam, {}, *rule, f_pi, datum);
        if (!res.applicable) fail(step, "OR not applicable");
      } else {
        std::vector<int> img = step.at("levi").get<std::vector<int>>();
        auto res = apply_triple(st, lam, img, *rule, f_pi, datum);
        if (!res.applicable) fail(step, "rule guard failed");
      }
      std::int64_t got = st.f.mult(mu);
      std::int64_t expect = step.at("l").get<std::int64_t>();
      if (got != expect)
        fail(step, "multiplicity at mu is " + std::to_string(got) + ", expected " +
                       std::to_string(expect));
      rs.value = got;
    } else if (op == "saturate") {
      st = saturate(st.f, f_pi, eng.rules);
    } else if (op == "assert") {
      CharacterX at = char_from_json(step.at("at"));
      std::int64_t expect = step.at("value").get<std::int64_t>();
      if (st.f.mult(at) != expect)
        fail(step, "multiplicity " + std::to_string(st.f.mult(at)) + ", expected " +
                       std::to_string(expect));
      rs.value = expect;
    } else if (op == "assert_fpi_mult") {
      CharacterX at = char_from_json(step.at("at"));
      std::int64_t expect = step.at("value").get<std::int64_t>();
      if (f_pi.mult(at) != expect)
        fail(step, "f_pi multiplicity " + std::to_string(f_pi.mult(at)) + ", expected " +
                       std::to_string(expect));
      rs.value = expect;
    } else if (op == "kernel") {
      std::vector<int> word = step.at("word").get<std::vector<int>>();
      std::size_t expect_rank = step.at("expect_rank").get<std::size_t>();
      std::size_t expect_kernel = step.at("expect_kernel").get<std::size_t>();
      auto cache_path = eng.cfg.cache_dir / ("hecke_" + name + ".json");
      json rep;
      if (std::filesystem::exists(cache_path)) {
        rep = json::parse(spill::slurp(cache_path));
      } else if (allow_heavy) {
        WeylTable table(datum);
        auto rows = module_rows(table, LeviSpec::maximal(datum.n, p.i), p, word,
                                eng.cfg.q, eng.cfg.cache_dir / ("rows_" + name), 64,
                                eng.cfg.workers);
        KernelConfig kc;
        kc.prime_seed = eng.cfg.prime_seed;
        kc.block_rows = eng.cfg.block_rows;
        kc.workers = eng.cfg.workers;
        auto kr = kernel_dimension(rows, kc);
        rep = {{"dim", kr.dim},
               {"rank", kr.rank},
               {"kernel", kr.kernel_dim},
               {"strategy", kr.strategy},
               {"prime", kr.prime},
               {"primes_used", kr.primes_used},
               {"verified_null_vectors", kr.verified_null_vectors}};
        spill::dump(cache_path, rep.dump(2) + "\n");
      } else {
        rs.skipped = true;
        result.complete = false;
        result.steps.push_back(rs);
        continue;
      }
      if (rep.at("rank").get<std::size_t>() != expect_rank ||
          rep.at("kernel").get<std::size_t>() != expect_kernel)
        fail(step, "kernel report (" + rep.at("rank").dump() + "," + rep.at("kernel").dump() +
                       ") expected (" + std::to_string(expect_rank) + "," +
                       std::to_string(expect_kernel) + ")");
      rs.value = static_cast<std::int64_t>(expect_kernel);
    } else {
      fail(step, "unknown op " + op);
    }
    result.steps.push_back(rs);
  }

  // Persist the outcome so classification runs can cite the replay.
  json out = {{"name", name}, {"ok", result.ok}, {"complete", result.complete}};
  spill::dump(eng.cfg.cache_dir / ("script_" + name + ".json"), out.dump(2) + "\n");
  return result;
}

// ---------------------------------------------------------------------------
// Table emission.

inline std::string verdict_cell(const json& row) {
  std::string v = row.at("verdict").get<std::string>();
  if (v == "reducible_regular") return "red.*";
  if (v == "reducible") return "red.";
  if (v == "irreducible") return "irr.";
  return "?";
}

// Emit the classification tables; markdown mirrors the published row/column
// scheme (s descending to 0 across, ord(chi) down).
inline std::string emit_table_markdown(Engine& eng, int i, const std::vector<std::int64_t>& ks) {
  std::map<Rat, std::size_t> cols;
  std::map<std::int64_t, json> rows;
  for (auto k : ks) {
    rows[k] = eng.classify_cached(i, k);
    for (const auto& r : rows[k]) cols.emplace(Rat::parse(r.at("s").get<std::string>()), 0);
  }
  std::size_t idx = 1;
  for (auto& [s, pos] : cols) pos = idx++;
  std::ostringstream os;
  os << "| ord(chi) \\ s |";
  for (const auto& [s, pos] : cols) os << " " << s.str() << " |";
  os << "\n|---|";
  for (std::size_t c = 0; c < cols.size(); ++c) os << "---|";
  os << "\n";
  for (auto k : ks) {
    std::vector<std::string> cells(cols.size());
    for (const auto& r : rows[k]) {
      Rat s = Rat::parse(r.at("s").get<std::string>());
      cells[cols[s] - 1] = verdict_cell(r);
    }
    os << "| " << k << " |";
    for (const auto& c : cells) os << " " << c << " |";
    os << "\n";
  }
  return os.str();
}

inline std::string emit_table_csv(Engine& eng, const std::vector<std::pair<int, std::int64_t>>& iks) {
  std::ostringstream os;
  os << "i,s,k,regularity,verdict,evidence\n";
  for (auto [i, k] : iks) {
    auto rows = eng.classify_cached(i, k);
    for (const auto& r : rows) {
      std::string ev = r.at("evidence").get<std::string>();
      for (auto& ch : ev)
        if (ch == ',') ch = ';';
      os << i << "," << r.at("s").get<std::string>() << "," << k << ","
         << r.at("regularity").get<std::string>() << "," << r.at("verdict").get<std::string>()
         << "," << ev << "\n";
    }
  }
  return os.str();
}

inline json emit_table_json(Engine& eng, const std::vector<std::pair<int, std::int64_t>>& iks) {
  json all = json::array();
  for (auto [i, k] : iks)
    for (const auto& r : eng.classify_cached(i, k)) all.push_back(r);
  // sorted by (i, k, s)
  std::vector<json> rows(all.begin(), all.end());
  std::sort(rows.begin(), rows.end(), [](const json& a, const json& b) {
    auto ta = std::make_tuple(a.at("i").get<int>(), a.at("k").get<std::int64_t>());
    auto tb = std::make_tuple(b.at("i").get<int>(), b.at("k").get<std::int64_t>());
    if (ta != tb) return ta < tb;
    return Rat::parse(a.at("s").get<std::string>()) < Rat::parse(b.at("s").get<std::string>());
  });
  return json(rows);
}

}  // namespace dps
