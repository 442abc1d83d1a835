// Command-line front end for the degenerate principal series engine.
#include <CLI11.hpp>
#include <iostream>

#include "dps/engine.hpp"

using namespace dps;

namespace {

std::vector<int> parse_word(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(std::stoi(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::stoi(cur));
  return out;
}

std::vector<std::pair<int, std::int64_t>> layout_rows(const Engine& eng) {
  std::vector<std::pair<int, std::int64_t>> iks;
  auto path = eng.cfg.data_dir / "table_layout.json";
  json layout = json::parse(spill::slurp(path));
  for (auto& [key, ks] : layout.at("rows").items())
    for (auto& k : ks) iks.emplace_back(std::stoi(key), k.get<std::int64_t>());
  std::sort(iks.begin(), iks.end());
  return iks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degenerate principal series classification engine"};
  app.require_subcommand(1);

  std::string config_file, cache_dir, data_dir, s_value = "0", word_str, format = "markdown";
  std::string script_name, out_path;
  int parabolic = 1, workers = 0;
  std::int64_t chi_order = 1, qval = 0;
  std::size_t block_rows = 0;
  bool refresh = false, heavy = false, json_out = false;

  app.add_option("--config", config_file, "flat key=value configuration file");
  app.add_option("--cache-dir", cache_dir, "cache directory");
  app.add_option("--data-dir", data_dir, "bundled data directory");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--q", qval, "residue field size for Hecke computations");
  app.add_option("--block-rows", block_rows, "elimination work-unit height");

  auto* cmd_datum = app.add_subcommand("datum", "root datum summary");
  auto* cmd_exp = app.add_subcommand("exponents", "exponent multiset of a point");
  auto* cmd_classify = app.add_subcommand("classify", "classify the special points of one row");
  auto* cmd_tadic = app.add_subcommand("tadic", "run the comparison test at a point");
  auto* cmd_branch = app.add_subcommand("branch", "saturation checks at a point");
  auto* cmd_kernel = app.add_subcommand("hecke-kernel", "intertwiner kernel dimension");
  auto* cmd_replay = app.add_subcommand("replay", "replay a bundled proof script");
  auto* cmd_tables = app.add_subcommand("tables", "emit the classification tables");

  for (auto* c : {cmd_exp, cmd_classify, cmd_tadic, cmd_branch, cmd_kernel}) {
    c->add_option("--parabolic", parabolic, "maximal parabolic index i");
    c->add_option("--chi-order", chi_order, "order of the finite twist");
  }
  for (auto* c : {cmd_exp, cmd_tadic, cmd_branch, cmd_kernel})
    c->add_option("--s", s_value, "character coefficient s (exact rational)");
  cmd_classify->add_flag("--refresh", refresh, "recompute even if cached");
  cmd_kernel->add_option("--word", word_str, "intertwiner Weyl word, comma separated");
  cmd_replay->add_option("script", script_name, "script name under data/scripts")->required();
  cmd_replay->add_flag("--heavy", heavy, "allow kernel computations during replay");
  cmd_tables->add_option("--format", format, "csv | json | markdown");
  cmd_tables->add_option("--out", out_path, "output file (default stdout)");
  cmd_exp->add_flag("--json", json_out, "emit the full multiset as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = RunConfig::load(config_file);
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (!data_dir.empty()) cfg.data_dir = data_dir;
    if (workers > 0) cfg.workers = workers;
    if (qval > 0) cfg.q = qval;
    if (block_rows > 0) cfg.block_rows = block_rows;

    Engine eng(cfg);
    DPSPoint p{parabolic, Rat::parse(s_value), chi_order};

    if (*cmd_datum) {
      std::cout << "datum " << cfg.datum_label << ": " << eng.datum->num_positive_roots()
                << " positive roots, |W| = " << eng.datum->weyl_order() << "\n";
      for (int i = 1; i <= eng.datum->n; ++i)
        std::cout << "  |W^{M" << i << ",T}| = " << eng.coset_reps(i).size() << "\n";
    } else if (*cmd_exp) {
      auto f = eng.exponents(p);
      if (json_out) {
        std::cout << expfun_to_json(f).dump(2) << "\n";
      } else {
        auto ad = antidominant_with_stabilizer(*eng.datum, leading_exponent(*eng.datum, p), false);
        std::cout << "point " << p.str() << ": mass " << f.total_mass() << ", support "
                  << f.support_size() << ", anti-dominant " << ad.lambda_ad.str() << " x "
                  << f.mult(ad.lambda_ad) << " (stab " << ad.stab_order << ")\n";
      }
    } else if (*cmd_classify) {
      auto rows = eng.classify_cached(parabolic, chi_order, refresh);
      std::cout << rows.dump(2) << "\n";
    } else if (*cmd_tadic) {
      auto cand = eng.candidate_for(parabolic, Rat::parse(s_value), chi_order);
      if (!cand) throw config_error("no candidate configured for " + p.str());
      auto res = tadic_test(*eng.datum, p, *cand);
      json out = {{"point", p.str()},
                  {"sigma", cand->str()},
                  {"outcome", res.outcome == TadicOutcome::reducible_confirmed
                                  ? "reducible_confirmed"
                                  : "inconclusive"},
                  {"stab_order", res.stab_order},
                  {"cond2_equality", res.cond2_equality}};
      if (res.witness_mu) {
        out["witness_mu"] = char_to_json(*res.witness_mu);
        out["mult_pi"] = res.mult_pi;
        out["mult_sigma"] = res.mult_sigma;
      }
      std::cout << out.dump(2) << "\n";
    } else if (*cmd_branch) {
      auto irr = check_irreducible(*eng.datum, p, eng.rules);
      auto uni = check_unique_subrep(*eng.datum, p, eng.rules);
      json out = {{"point", p.str()},
                  {"check_irreducible",
                   irr == Irreducibility::irreducible ? "irreducible" : "inconclusive"},
                  {"check_unique_subrep", uni == Uniqueness::unique ? "unique" : "inconclusive"}};
      std::cout << out.dump(2) << "\n";
    } else if (*cmd_kernel) {
      std::vector<int> word;
      if (!word_str.empty()) {
        word = parse_word(word_str);
      } else {
        json targets = json::parse(spill::slurp(cfg.data_dir / "hecke_targets.json"));
        for (const auto& t : targets.at("targets"))
          if (t.at("i").get<int>() == parabolic &&
              Rat::parse(t.at("s").get<std::string>()) == p.s &&
              t.at("k").get<std::int64_t>() == chi_order)
            word = t.at("word").get<std::vector<int>>();
        if (word.empty())
          throw config_error("no bundled word for " + p.str() + "; pass --word");
      }
      WeylTable table(*eng.datum);
      auto rows = module_rows(table, LeviSpec::maximal(eng.datum->n, parabolic), p, word, cfg.q,
                              cfg.cache_dir / ("rows_P" + std::to_string(parabolic)),
                              64, cfg.workers);
      KernelConfig kc;
      kc.prime_seed = cfg.prime_seed;
      kc.block_rows = cfg.block_rows;
      kc.workers = cfg.workers;
      auto rep = kernel_dimension(rows, kc);
      json out = {{"point", p.str()},
                  {"word", word},
                  {"q", cfg.q},
                  {"dim", rep.dim},
                  {"rank", rep.rank},
                  {"kernel", rep.kernel_dim},
                  {"certification", rep.certification == Certification::exact
                                        ? "exact"
                                        : "modular-upper-bound + exact-nullvectors"},
                  {"strategy", rep.strategy},
                  {"prime", rep.prime},
                  {"primes_used", rep.primes_used},
                  {"verified_null_vectors", rep.verified_null_vectors}};
      std::cout << out.dump(2) << "\n";
    } else if (*cmd_replay) {
      auto res = replay_proof_script(eng, script_name, heavy);
      for (const auto& st : res.steps)
        std::cout << (st.skipped ? "SKIP " : "ok   ") << st.description << "\n";
      std::cout << (res.ok ? (res.complete ? "replay complete" : "replay ok (heavy steps skipped)")
                           : "replay FAILED")
                << "\n";
    } else if (*cmd_tables) {
      auto iks = layout_rows(eng);
      std::string payload;
      if (format == "csv") {
        payload = emit_table_csv(eng, iks);
      } else if (format == "json") {
        payload = emit_table_json(eng, iks).dump(2) + "\n";
      } else if (format == "markdown") {
        std::ostringstream os;
        json layout = json::parse(spill::slurp(cfg.data_dir / "table_layout.json"));
        for (auto& [key, ks] : layout.at("rows").items()) {
          os << "## P" << key << "\n\n";
          os << emit_table_markdown(eng, std::stoi(key), ks.get<std::vector<std::int64_t>>())
             << "\n";
        }
        payload = os.str();
      } else {
        throw config_error("unknown format: " + format);
      }
      if (out_path.empty()) {
        std::cout << payload;
      } else {
        spill::dump(out_path, payload);
      }
    }
    return 0;
  } catch (const assertion_error& e) {
    std::cerr << "assertion mismatch: " << e.what() << "\n";
    return 2;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const storage_error& e) {
    std::cerr << "resource exhaustion (checkpoint kept): " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
