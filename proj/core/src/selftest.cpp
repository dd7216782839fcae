#include "galmod/selftest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include "galmod/decompose.hpp"
#include "galmod/errors.hpp"
#include "galmod/json_io.hpp"
#include "galmod/lemmas.hpp"
#include "galmod/local_fields.hpp"
#include "galmod/synth.hpp"

namespace galmod {

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            task(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string format_result(const CriterionResult& result) {
  char seconds[32];
  std::snprintf(seconds, sizeof seconds, "%.2f", result.seconds);
  return std::string(result.pass ? "PASS" : "FAIL") + " [" + std::to_string(result.id) + "] " +
         result.name + ": " + result.detail + " (" + seconds + " s)";
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string params_key(const SynthParams& params) {
  std::ostringstream out;
  out << "p=" << params.p << " n=" << params.n << " m=" << level_label(params.m) << " e=";
  for (std::size_t i = 0; i < params.e.size(); ++i) out << (i ? "," : "") << params.e[i];
  if (params.shuffle_seed) out << " shuffle=" << *params.shuffle_seed;
  return out.str();
}

std::vector<SynthParams> sweep_params(const AcceptanceOptions& options) {
  std::vector<SynthParams> out;
  std::uint64_t shuffle = 1;
  for (const unsigned p : {2u, 3u, 5u}) {
    for (unsigned n = 1; n <= 3; ++n) {
      for (auto params : enumerate_params(p, n, options.rank_cap, options.dim_cap)) {
        out.push_back(params);
        params.shuffle_seed = shuffle++;
        out.push_back(std::move(params));
      }
    }
  }
  return out;
}

// First failure message per criterion; empty means pass or not applicable.
struct SweepOutcome {
  std::string roundtrip;
  std::string krull_schmidt;
  bool theorem3_applies = false;
  std::string theorem3;
  std::string ranks;
  bool corollary3_applies = false;
  std::string corollary3;
  double corollary3_seconds = 0.0;
  std::string lemmas;
};

std::string first_failed(const Report& report) {
  for (const auto& c : report.clauses) {
    if (!c.pass) return c.id + " " + c.detail;
  }
  return {};
}

std::string rank_identities(const GaloisDatum& d, const Decomposition& dec, const Report& report) {
  const auto e = e_ranks(d);
  const auto y = y_ranks(dec, d.n);
  for (unsigned i = 0; i <= d.n; ++i) {
    const bool at_m = dec.m && !dec.m->is_neg_infinity() &&
                      static_cast<unsigned>(dec.m->value()) == i;
    if (e[i] != y[i] + (at_m ? 1 : 0)) {
      return "e_" + std::to_string(i) + " = " + std::to_string(e[i]) + ", rank Y_" +
             std::to_string(i) + " = " + std::to_string(y[i]);
    }
  }
  std::size_t corollary_clauses = 0;
  for (const auto& c : report.clauses) {
    if (c.id.starts_with("C1.") || c.id.starts_with("C2.")) {
      ++corollary_clauses;
      if (!c.pass) return c.id + " " + c.detail;
    }
  }
  if (corollary_clauses == 0) return "no corollary clauses reported";
  return {};
}

void roundtrip_phase(const SynthParams& params, SweepOutcome& out) {
  try {
    const SynthExpectation want = expected_answer(params);
    const GaloisDatum d = synthesize(params);
    if (const auto v = validate(d); !v.empty()) {
      out.roundtrip = "validate: " + v.front().clause + " " + v.front().detail;
      return;
    }
    const Decomposition dec = decompose(d);
    const Report report = verify(dec, d);
    if (dec.m != want.m) {
      out.roundtrip = "m = " + level_label(dec.m) + ", expected " + level_label(want.m);
    } else if (y_ranks(dec, d.n) != want.y_ranks || e_ranks(d) != want.e) {
      out.roundtrip = "rank vector differs from the parameters";
    } else if (!report.all_pass()) {
      out.roundtrip = "verify: " + first_failed(report);
    }

    const BlockMultiset blocks = summand_sizes(dec, d.p);
    if (blocks != jordan_type(d.J) || blocks != want.jordan_type) {
      out.krull_schmidt = "summand sizes differ from the Jordan type";
    }

    if (exceptional_hypotheses_hold(d)) {
      out.theorem3_applies = true;
      const Level searched = exceptional_search(d).m;
      const Level third = i_via_theorem3(d);
      if (searched != third || !params.m || searched != *params.m) {
        out.theorem3 = "search " + searched.to_string() + ", third characterization " +
                       third.to_string() + ", parameters " + level_label(params.m);
      }
    }
    out.ranks = rank_identities(d, dec, report);
  } catch (const std::exception& e) {
    out.roundtrip = std::string("exception: ") + e.what();
  }
}

void property_phase(const SynthParams& params, std::uint64_t seed, SweepOutcome& out) {
  try {
    const GaloisDatum d = synthesize(params);
    if (params.m) {
      out.corollary3_applies = true;
      const auto start = Clock::now();
      out.corollary3 = first_failed(corollary3_check(d));
      out.corollary3_seconds = since(start);
    }
    out.lemmas = first_failed(lemma_suite(d, {seed, 48}));
  } catch (const std::exception& e) {
    out.lemmas = std::string("exception: ") + e.what();
  }
}

struct Tally {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string first;

  void add(const std::string& key, const std::string& error) {
    ++checked;
    if (error.empty()) return;
    if (failed++ == 0) first = key + ": " + error;
  }
  [[nodiscard]] std::string summary(const std::string& noun) const {
    std::string s = std::to_string(checked) + " " + noun + ", " + std::to_string(failed) +
                    " failures";
    if (failed) s += "; first: " + first;
    return s;
  }
};

struct LocalInstance {
  TowerSpec spec;
  std::string label;
  std::optional<GaloisDatum> datum;
  std::optional<Decomposition> dec;
  std::string error;
};

std::size_t classical_dim(const TowerSpec& spec, unsigned level) {
  const std::size_t degree =
      ipow(spec.p, level) * (spec.kind == TowerKind::cyclotomic ? spec.p - 1 : 1);
  const bool has_zeta = spec.kind == TowerKind::cyclotomic || spec.p == 2;
  return degree + 1 + (has_zeta ? 1 : 0);
}

LocalInstance build_local(unsigned p, TowerKind kind, unsigned n, std::size_t precision) {
  LocalInstance inst;
  inst.spec = {p, kind, n, std::max(precision, minimum_precision(p, kind, n))};
  inst.label = to_string(kind) + " p=" + std::to_string(p) + " n=" + std::to_string(n) +
               " precision=" + std::to_string(inst.spec.precision);
  try {
    const LocalTower tower(inst.spec);
    GaloisDatum d = build_datum(tower);
    if (const auto v = validate(d); !v.empty()) {
      inst.error = "validate: " + v.front().clause + " " + v.front().detail;
    } else {
      inst.dec = decompose(d);
    }
    inst.datum = std::move(d);
  } catch (const std::exception& e) {
    inst.error = e.what();
  }
  return inst;
}

bool same_datum_at(const TowerSpec& spec, std::size_t other_precision, std::string& error) {
  try {
    TowerSpec other = spec;
    other.precision = other_precision;
    return build_datum(LocalTower(spec)) == build_datum(LocalTower(other));
  } catch (const std::exception& e) {
    error = e.what();
    return false;
  }
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  const std::vector<SynthParams> sweep = sweep_params(options);
  std::vector<SweepOutcome> outcomes(sweep.size());

  // Criteria 1-4 on the sweep.
  const auto roundtrip_start = Clock::now();
  parallel_for(sweep.size(), options.jobs,
               [&](std::size_t i) { roundtrip_phase(sweep[i], outcomes[i]); });
  const double roundtrip_seconds = since(roundtrip_start);

  // Local towers.
  const auto local_start = Clock::now();
  std::vector<LocalInstance> locals;
  locals.push_back(build_local(3, TowerKind::unramified, 1, 40));
  locals.push_back(build_local(3, TowerKind::cyclotomic, 1, 60));
  locals.push_back(build_local(3, TowerKind::cyclotomic, 2, 62));
  locals.push_back(build_local(2, TowerKind::cyclotomic, 1, 20));
  locals.push_back(build_local(5, TowerKind::unramified, 1, 20));
  locals.push_back(build_local(3, TowerKind::unramified, 2, 20));
  const double local_seconds = since(local_start);

  {
    Tally roundtrip;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      roundtrip.add(params_key(sweep[i]), outcomes[i].roundtrip);
    }
    const bool pass = roundtrip.checked >= 500 && roundtrip.failed == 0 &&
                      roundtrip_seconds < options.roundtrip_budget_seconds;
    results.push_back({1, "round-trip sweep", pass,
                       roundtrip.summary("instances") + ", budget " +
                           std::to_string(static_cast<int>(options.roundtrip_budget_seconds)) +
                           " s",
                       roundtrip_seconds});
  }
  {
    Tally ks;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      ks.add(params_key(sweep[i]), outcomes[i].krull_schmidt);
    }
    results.push_back({2, "Krull-Schmidt oracle", ks.failed == 0 && ks.checked > 0,
                       ks.summary("instances"), 0.0});
  }
  {
    Tally t3;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (outcomes[i].theorem3_applies) t3.add(params_key(sweep[i]), outcomes[i].theorem3);
    }
    for (const auto& inst : locals) {
      if (!inst.datum || !inst.error.empty() || !exceptional_hypotheses_hold(*inst.datum)) continue;
      std::string error;
      try {
        const Level searched = exceptional_search(*inst.datum).m;
        const Level third = i_via_theorem3(*inst.datum);
        if (searched != third) error = searched.to_string() + " vs " + third.to_string();
      } catch (const std::exception& e) {
        error = e.what();
      }
      t3.add(inst.label, error);
    }
    results.push_back({3, "Theorem 3 agreement", t3.failed == 0 && t3.checked > 0,
                       t3.summary("instances under the hypotheses"), 0.0});
  }
  {
    Tally ranks;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      ranks.add(params_key(sweep[i]),
                outcomes[i].roundtrip.empty() ? outcomes[i].ranks : outcomes[i].roundtrip);
    }
    for (const auto& inst : locals) {
      std::string error = inst.error;
      if (error.empty()) {
        try {
          error = rank_identities(*inst.datum, *inst.dec, verify(*inst.dec, *inst.datum));
        } catch (const std::exception& e) {
          error = e.what();
        }
      }
      ranks.add(inst.label, error);
    }
    results.push_back({4, "Corollary 1/2 rank identities", ranks.failed == 0,
                       ranks.summary("instances"), 0.0});
  }

  // Criteria 5 and 7 on the sweep.
  const auto property_start = Clock::now();
  parallel_for(sweep.size(), options.jobs,
               [&](std::size_t i) { property_phase(sweep[i], i, outcomes[i]); });
  const double property_seconds = since(property_start);

  {
    const auto start = Clock::now();
    Tally c3;
    double sweep_seconds = 0.0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      if (!outcomes[i].corollary3_applies) continue;
      c3.add(params_key(sweep[i]), outcomes[i].corollary3);
      sweep_seconds += outcomes[i].corollary3_seconds;
    }
    std::string tower_error;
    const LocalInstance& top = locals[2];
    const LocalInstance& sub = locals[1];
    if (!top.error.empty() || !sub.error.empty()) {
      tower_error = top.error.empty() ? sub.error : top.error;
    } else {
      try {
        const Report report = corollary3_check(*top.datum, std::span(&*sub.datum, 1));
        tower_error = first_failed(report);
        const bool has_subextension_clause = std::any_of(
            report.clauses.begin(), report.clauses.end(),
            [](const ClauseResult& c) { return c.id.starts_with("C3.2"); });
        if (tower_error.empty() && !has_subextension_clause) tower_error = "C3.2 not evaluated";
      } catch (const std::exception& e) {
        tower_error = e.what();
      }
    }
    c3.add(top.label, tower_error);
    // Summed per-instance time, so the budget does not depend on the thread count.
    const double seconds = sweep_seconds + since(start);
    const bool pass = c3.failed == 0 && c3.checked > 1 &&
                      seconds + local_seconds < options.corollary3_budget_seconds;
    results.push_back({5, "Corollary 3 restriction table", pass,
                       c3.summary("Theorem-2 instances and towers"), seconds + local_seconds});
  }

  {
    const auto start = Clock::now();
    std::vector<std::string> failures;
    auto expect = [&](bool ok, const std::string& what) {
      if (!ok) failures.push_back(what);
    };
    const LocalInstance& a = locals[0];
    if (!a.error.empty()) {
      failures.push_back("(a) " + a.error);
    } else {
      expect(a.datum->J.dim() == 4, "(a) dim J != 4");
      expect(!a.dec->theorem2(), "(a) not a Theorem-1 decomposition");
      expect(jordan_type(a.datum->J) == BlockMultiset{3, 1}, "(a) block multiset != {3,1}");
      expect(e_ranks(*a.datum) == std::vector<std::size_t>{1, 1}, "(a) e != (1,1)");
      expect(verify(*a.dec, *a.datum).all_pass(), "(a) verify failed");
    }
    const LocalInstance& b = locals[1];
    if (!b.error.empty()) {
      failures.push_back("(b) " + b.error);
    } else {
      expect(b.datum->J.dim() == 8, "(b) dim J != 8");
      expect(b.dec->theorem2(), "(b) not a Theorem-2 decomposition");
      if (b.dec->theorem2()) {
        expect(x_module(*b.dec, *b.datum).dim() == b.dec->m->p_power(3) + 1,
               "(b) dim X != 3^m + 1");
        expect(exceptional_search(*b.datum).m == i_via_theorem3(*b.datum),
               "(b) Theorem 3 disagreement");
      }
      expect(verify(*b.dec, *b.datum).all_pass(), "(b) verify failed");
    }
    for (const auto& inst : locals) {
      if (!inst.datum) {
        failures.push_back(inst.label + ": " + inst.error);
        continue;
      }
      for (unsigned i = 0; i <= inst.spec.n; ++i) {
        expect(inst.datum->levels[i].space.dim() == classical_dim(inst.spec, i),
               inst.label + ": dim J(K_" + std::to_string(i) + ") differs from the degree count");
      }
    }
    const std::vector<std::pair<TowerSpec, std::size_t>> stability = {
        {{3, TowerKind::unramified, 1, 35}, 40},
        {{5, TowerKind::unramified, 1, 20}, 25},
        {{3, TowerKind::cyclotomic, 1, 60}, 65},
        {{3, TowerKind::cyclotomic, 2, 62}, 67},
        {{2, TowerKind::cyclotomic, 1, 20}, 25},
    };
    for (const auto& [spec, higher] : stability) {
      std::string error;
      expect(same_datum_at(spec, higher, error),
             "(c) " + to_string(spec.kind) + " p=" + std::to_string(spec.p) +
                 " n=" + std::to_string(spec.n) + " differs at precision " +
                 std::to_string(spec.precision) + " vs " + std::to_string(higher) +
                 (error.empty() ? "" : ": " + error));
    }
    std::string detail = "(a) dim 4, {3,1}, e=(1,1); (b) dim 8, dim X = 3^m+1; (c) " +
                         std::to_string(stability.size()) + " precision pairs; " +
                         std::to_string(locals.size()) + " towers";
    if (!failures.empty()) detail = std::to_string(failures.size()) + " failures; first: " + failures.front();
    results.push_back({6, "local-field instances", failures.empty(), detail,
                       since(start) + local_seconds});
  }

  {
    const auto start = Clock::now();
    Tally lemmas;
    for (std::size_t i = 0; i < sweep.size(); ++i) lemmas.add(params_key(sweep[i]), outcomes[i].lemmas);
    for (const auto& inst : locals) {
      std::string error = inst.error;
      if (error.empty()) {
        try {
          error = first_failed(lemma_suite(*inst.datum));
        } catch (const std::exception& e) {
          error = e.what();
        }
      }
      lemmas.add(inst.label, error);
    }
    struct FreeCase {
      unsigned p;
      unsigned n;
      std::uint64_t seed;
    };
    std::vector<FreeCase> free_cases;
    for (const unsigned p : {2u, 3u, 5u}) {
      for (unsigned n = 1; n <= 3; ++n) {
        for (std::size_t s = 0; s < options.free_modules; ++s) free_cases.push_back({p, n, s});
      }
    }
    std::vector<char> free_ok(free_cases.size(), 0);
    parallel_for(free_cases.size(), options.jobs, [&](std::size_t i) {
      const FreeCase& fc = free_cases[i];
      const FreeSample sample = random_free_sample(fc.p, fc.n, options.dim_cap, fc.seed);
      free_ok[i] = is_submodule(sample.module, sample.free_part) &&
                   submodule_subfield_holds(sample.module, sample.free_part);
    });
    Tally free;
    for (std::size_t i = 0; i < free_cases.size(); ++i) {
      free.add("free module p=" + std::to_string(free_cases[i].p) +
                   " n=" + std::to_string(free_cases[i].n) +
                   " seed=" + std::to_string(free_cases[i].seed),
               free_ok[i] ? "" : "U^{H_i} != N^{p^n-p^i} U");
    }
    const bool pass = lemmas.failed == 0 && free.failed == 0 && free.checked > 0;
    results.push_back({7, "lemma property suite", pass,
                       lemmas.summary("data") + "; " + free.summary("free modules"),
                       property_seconds + since(start)});
  }

  {
    const auto start = Clock::now();
    Tally normcond;
    std::size_t rejected = 0;
    std::size_t controls = 0;
    for (const unsigned n : {1u, 2u}) {
      const std::string label = "cyclotomic p=3 n=" + std::to_string(n);
      try {
        const LocalTower tower(
            {3, TowerKind::cyclotomic, n, minimum_precision(3, TowerKind::cyclotomic, n) + 10});
        const GaloisDatum d = build_datum(tower);
        for (std::size_t s = 0; s < options.normcond_samples; ++s) {
          const unsigned level = static_cast<unsigned>(s % n);
          std::string error;
          try {
            const NormcondSample sample = sample_normcond(tower, d, level, s);
            if (!root_norm_crosscheck(tower, sample.alpha, sample.gamma, sample.k, level)) {
              error = "sides differ";
            }
            // Negative control: a wrong k must be caught.
            ++controls;
            try {
              const LFElement bad_k = tower.mul(sample.k, tower.uniformizer());
              if (!root_norm_crosscheck(tower, sample.alpha, sample.gamma, bad_k, level)) ++rejected;
            } catch (const InvalidInput&) {
              ++rejected;
            }
          } catch (const std::exception& e) {
            error = e.what();
          }
          normcond.add(label + " sample " + std::to_string(s), error);
        }
      } catch (const std::exception& e) {
        normcond.add(label, e.what());
      }
    }
    const bool pass = normcond.failed == 0 && normcond.checked >= 2 * options.normcond_samples &&
                      rejected == controls;
    results.push_back({8, "root-norm identity cross-check", pass,
                       normcond.summary("samples") + ", " + std::to_string(rejected) + "/" +
                           std::to_string(controls) + " perturbed samples rejected",
                       since(start)});
  }
  return results;
}

}  // namespace galmod
