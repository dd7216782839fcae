#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "galmod/decompose.hpp"
#include "galmod/errors.hpp"
#include "galmod/json_io.hpp"
#include "galmod/lemmas.hpp"
#include "galmod/local_fields.hpp"
#include "galmod/selftest.hpp"
#include "galmod/synth.hpp"

namespace galmod::cli {

namespace {

namespace fs = std::filesystem;

enum class Format { table, json };

struct Config {
  unsigned p = 3;
  unsigned n = 1;
  std::string m = "n/a";
  std::vector<std::size_t> e;
  std::optional<std::uint64_t> seed;
  bool xi_in_F = false;
  std::string kind = "unramified";
  std::optional<std::size_t> precision;
  std::string in;
  std::string out;
  std::string dec;
  std::string sidecar;
  Format format = Format::table;
  std::size_t jobs = 0;
  std::size_t dim_cap = 200;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text << '\n';
  if (!out) throw InvalidInput("write failed for " + path);
}

std::optional<Level> parse_level(const std::string& text) {
  if (text == "n/a" || text == "na") return std::nullopt;
  if (text == "-inf" || text == "neg-inf" || text == "ninf") return Level::neg_infinity();
  std::size_t used = 0;
  int value = -1;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || value < 0) {
    throw InvalidInput("--m: expected -inf, n/a or a nonnegative integer, got '" + text + "'");
  }
  return Level(value);
}

template <class Seq>
std::string join(const Seq& items, const char* open, const char* close) {
  std::ostringstream s;
  s << open;
  bool first = true;
  for (const auto& x : items) {
    s << (first ? "" : ", ") << x;
    first = false;
  }
  s << close;
  return s.str();
}

// X.json -> X.sidecar.json next to it.
std::string sidecar_path(const std::string& datum_path) {
  fs::path path(datum_path);
  return (path.parent_path() / (path.stem().string() + ".sidecar.json")).string();
}

void emit(const Config& cfg, std::ostream& out, const std::string& json) {
  if (cfg.out.empty()) {
    out << json << '\n';
  } else {
    write_file(cfg.out, json);
  }
}

int cmd_synth(const Config& cfg, std::ostream& out) {
  SynthParams params;
  if (cfg.e.empty()) {
    params = random_params(cfg.p, cfg.n, cfg.seed.value_or(0), std::min<std::size_t>(cfg.dim_cap, 120));
    params.shuffle_seed = cfg.seed;
  } else {
    params.p = cfg.p;
    params.n = cfg.n;
    params.m = parse_level(cfg.m);
    params.e = cfg.e;
    params.xi_in_F = params.m.has_value() || cfg.xi_in_F;
    if (params.p == 2 && params.n == 1 && params.xi_in_F) {
      params.minus_one_is_norm = params.m.has_value();
    }
    params.shuffle_seed = cfg.seed;
  }
  check_params(params);
  const SynthExpectation want = expected_answer(params);
  if (want.dim > cfg.dim_cap) {
    throw InvalidInput("dim J = " + std::to_string(want.dim) + " exceeds --dim-cap " +
                       std::to_string(cfg.dim_cap));
  }
  const GaloisDatum d = synthesize(params);
  if (cfg.out.empty()) {
    out << datum_to_json(d) << '\n';
    return kOk;
  }
  write_file(cfg.out, datum_to_json(d));
  write_file(sidecar_path(cfg.out), sidecar_to_json(params, want));
  out << "wrote " << cfg.out << " (dim J = " << want.dim << ", m = " << level_label(want.m)
      << ") and " << sidecar_path(cfg.out) << '\n';
  return kOk;
}

std::string decomposition_table(const Decomposition& dec, const GaloisDatum& d) {
  std::ostringstream s;
  s << "case     " << (dec.theorem2() ? "Theorem 2" : "Theorem 1") << '\n';
  s << "m        " << level_label(dec.m) << '\n';
  s << "e        " << join(e_ranks(d), "(", ")") << '\n';
  s << "rank Y   " << join(y_ranks(dec, d.n), "(", ")") << '\n';
  s << "blocks   " << join(summand_sizes(dec, d.p), "{", "}") << '\n';
  if (dec.theorem2()) s << "dim X    " << x_module(dec, d).dim() << '\n';
  s << "dim J    " << d.J.dim() << '\n';
  return s.str();
}

GaloisDatum load_datum(const Config& cfg) {
  if (cfg.in.empty()) throw InvalidInput("--in is required");
  GaloisDatum d = datum_from_json(read_file(cfg.in));
  if (const auto v = validate(d); !v.empty()) {
    throw InvalidInput("datum fails validation: " + v.front().clause + ": " + v.front().detail);
  }
  return d;
}

int cmd_decompose(const Config& cfg, std::ostream& out) {
  const GaloisDatum d = load_datum(cfg);
  const Decomposition dec = decompose(d);
  if (!cfg.out.empty()) write_file(cfg.out, decomposition_to_json(dec));
  if (cfg.format == Format::json) {
    if (cfg.out.empty()) out << decomposition_to_json(dec) << '\n';
  } else {
    out << decomposition_table(dec, d);
  }
  if (!cfg.sidecar.empty()) {
    const SynthExpectation want = sidecar_expectation_from_json(read_file(cfg.sidecar));
    const bool match = dec.m == want.m && y_ranks(dec, d.n) == want.y_ranks &&
                       e_ranks(d) == want.e && summand_sizes(dec, d.p) == want.jordan_type;
    out << "sidecar  " << (match ? "match" : "MISMATCH") << '\n';
    if (!match) return kVerifyFailed;
  }
  return kOk;
}

void print_report(const Report& report, const Config& cfg, std::ostream& out) {
  if (cfg.format == Format::json) {
    out << report_to_json(report) << '\n';
    return;
  }
  for (const auto& c : report.clauses) {
    out << (c.pass ? "PASS " : "FAIL ") << c.id << "  " << c.detail << '\n';
  }
  for (const auto& note : report.notes) out << "note " << note << '\n';
  out << (report.all_pass() ? "all clauses pass" : "failed: " + join(report.failed_ids(), "", ""))
      << '\n';
}

int cmd_verify(const Config& cfg, std::ostream& out) {
  if (cfg.dec.empty()) throw InvalidInput("--dec is required");
  const GaloisDatum d = load_datum(cfg);
  const Decomposition dec = decomposition_from_json(read_file(cfg.dec), d.p);
  const Report report = verify(dec, d);
  print_report(report, cfg, out);
  return report.all_pass() ? kOk : kVerifyFailed;
}

int cmd_invariants(const Config& cfg, std::ostream& out) {
  const GaloisDatum d = load_datum(cfg);
  const Report report = lemma_suite(d, {cfg.seed.value_or(0), 48});
  print_report(report, cfg, out);
  return report.all_pass() ? kOk : kVerifyFailed;
}

int cmd_local(const Config& cfg, std::ostream& out) {
  TowerSpec spec;
  if (!cfg.in.empty()) {
    spec = tower_spec_from_json(read_file(cfg.in));
  } else {
    spec.p = cfg.p;
    spec.kind = tower_kind_from_string(cfg.kind);
    spec.n = cfg.n;
    spec.precision = cfg.precision.value_or(minimum_precision(spec.p, spec.kind, spec.n));
  }
  const GaloisDatum d = build_datum(LocalTower(spec));
  if (const auto v = validate(d); !v.empty()) {
    throw InternalInconsistency("extracted datum fails validation: " + v.front().clause + ": " +
                                v.front().detail);
  }
  emit(cfg, out, datum_to_json(d));
  if (!cfg.out.empty()) {
    out << "wrote " << cfg.out << " (" << to_string(spec.kind) << " p = " << spec.p
        << ", n = " << spec.n << ", precision " << spec.precision << ", dim J = " << d.J.dim()
        << ")\n";
  }
  return kOk;
}

int cmd_jordan(const Config& cfg, std::ostream& out) {
  if (cfg.in.empty()) throw InvalidInput("--in is required");
  const GModule m = module_from_json(read_file(cfg.in));
  const BlockMultiset blocks = jordan_type(m);
  if (cfg.format == Format::json) {
    out << "{\"blocks\": " << join(blocks, "[", "]") << "}\n";
  } else {
    out << join(blocks, "{", "}") << '\n';
  }
  return kOk;
}

int cmd_selftest(const Config& cfg, std::ostream& out) {
  AcceptanceOptions options;
  options.jobs = cfg.jobs;
  options.dim_cap = std::min<std::size_t>(cfg.dim_cap, 120);
  const auto results = run_acceptance(options);
  if (cfg.format == Format::json) {
    out << acceptance_to_json(results) << '\n';
  } else {
    for (const auto& r : results) out << format_result(r) << '\n';
  }
  const bool all = std::all_of(results.begin(), results.end(),
                               [](const CriterionResult& r) { return r.pass; });
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Galois module structure of p-th power classes"};
  app.require_subcommand(1);
  Config cfg;

  const std::map<std::string, Format> formats{{"table", Format::table}, {"json", Format::json}};
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "table or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };

  auto* synth = app.add_subcommand("synth", "synthesize a datum with prescribed invariants");
  synth->add_option("--p", cfg.p, "prime");
  synth->add_option("--n", cfg.n, "height of the tower");
  synth->add_option("--m", cfg.m, "i(K/F): -inf, 0..n-1, or n/a (use --m=-inf)");
  synth->add_option("--e", cfg.e, "e_0,...,e_n; random parameters when omitted")->delimiter(',');
  synth->add_option("--seed", cfg.seed, "basis shuffle seed");
  synth->add_flag("--xi-in-F", cfg.xi_in_F, "Theorem 1 case with xi_p in F (p = 2, n = 1)");
  synth->add_option("--out", cfg.out, "datum path; the sidecar is written next to it");
  synth->add_option("--dim-cap", cfg.dim_cap, "largest accepted dim J");

  auto* dec = app.add_subcommand("decompose", "decompose a datum");
  dec->add_option("--in", cfg.in, "datum JSON")->required();
  dec->add_option("--out", cfg.out, "decomposition JSON output");
  dec->add_option("--sidecar", cfg.sidecar, "compare with a synth sidecar");
  add_format(dec);

  auto* ver = app.add_subcommand("verify", "re-check a decomposition against a datum");
  ver->add_option("--in", cfg.in, "datum JSON")->required();
  ver->add_option("--dec", cfg.dec, "decomposition JSON")->required();
  add_format(ver);

  auto* inv = app.add_subcommand("invariants", "run the lemma property suite on a datum");
  inv->add_option("--in", cfg.in, "datum JSON")->required();
  inv->add_option("--seed", cfg.seed, "sampling seed");
  add_format(inv);

  auto* local = app.add_subcommand("local", "build a p-adic tower and emit its datum");
  local->add_option("--p", cfg.p, "prime");
  local->add_option("--kind", cfg.kind, "unramified or cyclotomic");
  local->add_option("--n", cfg.n, "height of the tower");
  local->add_option("--precision", cfg.precision, "pi-adic digits of the top field");
  local->add_option("--in", cfg.in, "tower spec JSON instead of flags");
  local->add_option("--out", cfg.out, "datum JSON output");

  auto* jordan = app.add_subcommand("jordan", "block multiset of a raw module");
  jordan->add_option("--in", cfg.in, "JSON {p, n, sigma}")->required();
  add_format(jordan);

  auto* self = app.add_subcommand("selftest", "run the acceptance sweep");
  self->add_option("--jobs", cfg.jobs, "worker threads (0: all cores)");
  self->add_option("--dim-cap", cfg.dim_cap, "largest dim J in the sweep (at most 120)");
  add_format(self);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*synth) return cmd_synth(cfg, out);
    if (*dec) return cmd_decompose(cfg, out);
    if (*ver) return cmd_verify(cfg, out);
    if (*inv) return cmd_invariants(cfg, out);
    if (*local) return cmd_local(cfg, out);
    if (*jordan) return cmd_jordan(cfg, out);
    if (*self) return cmd_selftest(cfg, out);
  } catch (const InternalInconsistency& e) {
    err << "internal inconsistency: " << e.what() << '\n';
    return kInternalInconsistency;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalInconsistency;
  }
  return kInvalidInput;
}

}  // namespace galmod::cli
