// Copyright 2026 The Conner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance runner: one PASS/FAIL line per release criterion.

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "conner/backend/mock.hpp"
#include "conner/backend/scorer.hpp"
#include "conner/core/text.hpp"
#include "conner/extrinsic/extrinsic.hpp"
#include "conner/intrinsic/intrinsic.hpp"
#include "conner/selection/selection.hpp"
#include "conner/stats/baseline.hpp"
#include "conner/stats/report.hpp"
#include "conner/stats/somers.hpp"
#include "support.hpp"

#ifndef CONNER_FIXTURE_DIR
#error "CONNER_FIXTURE_DIR must point at tests/fixtures"
#endif
#ifndef CONNER_CLI
#error "CONNER_CLI must name the conner executable"
#endif

namespace {

using namespace conner;
namespace fs = std::filesystem;
using nlohmann::json;
using Outcome = std::optional<std::string>;  // empty means pass

const fs::path kFixtures = CONNER_FIXTURE_DIR;

#define REQUIRE(cond, ...)                           \
  do {                                               \
    if (!(cond)) return fmt::format(__VA_ARGS__);    \
  } while (0)

Outcome factuality_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  const FactualityMode modes[] = {FactualityMode::kMin, FactualityMode::kMean,
                                  FactualityMode::kMax};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto grid = conner::testing::random_grid(rng);
    double entail[3];
    for (int k = 0; k < 3; ++k) {
      const auto got = intrinsic::factuality_from_grid(grid, modes[k]).vector;
      const auto want = conner::testing::factuality_oracle(grid, modes[k]);
      const double err = std::max({std::abs(got.entail() - want.entail()),
                                   std::abs(got.neutral() - want.neutral()),
                                   std::abs(got.contradict() - want.contradict())});
      REQUIRE(err <= 1e-12, "grid {} mode {}: off by {}", trial, k, err);
      entail[k] = got.entail();
    }
    REQUIRE(entail[0] <= entail[1] + 1e-15 && entail[1] <= entail[2] + 1e-15,
            "grid {}: min {} mean {} max {}", trial, entail[0], entail[1], entail[2]);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  REQUIRE(secs < 10.0, "took {:.2f} s", secs);
  return std::nullopt;
}

Outcome helpfulness_properties() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u(0.01, 20.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> base(1 + rng() % 8);
    for (auto& b : base) b = u(rng);
    const double mean = std::accumulate(base.begin(), base.end(), 0.0) / base.size();
    double loss = u(rng);
    if (trial % 10 == 0) loss = 0.0;
    if (trial % 10 == 1) loss = mean;
    const double s = extrinsic::helpfulness_score(loss, base);
    REQUIRE(s >= 0.0 && s <= 1.0, "trial {}: score {}", trial, s);
    REQUIRE((s == 1.0) == (loss == 0.0), "trial {}: score {} for loss {}", trial, s, loss);
    if (loss >= mean) REQUIRE(s == 0.0, "trial {}: loss above baseline scored {}", trial, s);
    if (loss < mean) REQUIRE(std::abs(s - (1.0 - loss / mean)) <= 1e-12, "trial {}", trial);

    const double c = 0.001 + u(rng);
    std::vector<double> scaled = base;
    for (auto& b : scaled) b *= c;
    const double rescaled = extrinsic::helpfulness_score(loss * c, scaled);
    REQUIRE(std::abs(rescaled - s) <= 1e-12, "trial {}: rescaled {} vs {}", trial, rescaled, s);

    const std::size_t tokens = 1 + rng() % 12;
    const extrinsic::AnswerLoss l{loss, tokens};
    std::vector<extrinsic::AnswerLoss> bl;
    for (double b : base) bl.push_back({b, tokens});
    const double sum = extrinsic::helpfulness_score(l, bl, extrinsic::LossAggregation::kSum);
    const double avg = extrinsic::helpfulness_score(l, bl, extrinsic::LossAggregation::kMean);
    REQUIRE(std::abs(sum - avg) <= 1e-12, "trial {}: sum {} mean {}", trial, sum, avg);
    REQUIRE(std::abs(sum - s) <= 1e-12, "trial {}: typed {} raw {}", trial, sum, s);
  }
  return std::nullopt;
}

Outcome informativeness_closed_form() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(-6.0, -1e-3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> lp(1 + rng() % 16);
    for (auto& v : lp) v = u(rng);
    double product = 1.0;
    for (double v : lp) product *= std::exp(v);
    const double want = 1.0 - std::pow(product, 1.0 / static_cast<double>(lp.size()));
    const double got = intrinsic::informativeness_from_logprobs(lp);
    REQUIRE(std::abs(got - want) <= 1e-9, "trial {}: {} vs {}", trial, got, want);

    auto raised = lp;
    auto& t = raised[rng() % raised.size()];
    t = t * 0.5;  // probability goes up
    const double after = intrinsic::informativeness_from_logprobs(raised);
    REQUIRE(after < got, "trial {}: {} did not drop below {}", trial, after, got);
  }
  return std::nullopt;
}

Outcome coherence_properties() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> u(-30.0, 0.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::vector<double>> per(1 + rng() % 5);
    for (auto& s : per) {
      s.resize(1 + rng() % 10);
      for (auto& v : s) v = u(rng);
    }
    const double got = intrinsic::sentence_cohesion(per);
    REQUIRE(got > 0.0 && got <= 1.0, "trial {}: {}", trial, got);
    for (auto& s : per) std::fill(s.begin(), s.end(), 0.0);
    REQUIRE(intrinsic::sentence_cohesion(per) == 1.0, "trial {}: certain text below 1", trial);

    const double r = std::uniform_real_distribution<double>(-40.0, 40.0)(rng);
    const double sym = intrinsic::logistic(r) + intrinsic::logistic(-r);
    REQUIRE(std::abs(sym - 1.0) <= 1e-12, "r = {}: f(r) + f(-r) = {}", r, sym);
  }
  return std::nullopt;
}

Outcome somers_properties() {
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 199;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng() % 25) / 4.0;  // ties on purpose
      y[i] = static_cast<double>(rng() % 3);
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) x[0] += 1.0;
    const double want = conner::testing::brute_somers(x, y);
    const double got = stats::somers_d(x, y);
    REQUIRE(std::abs(got - want) <= 1e-12, "sample {}: {} vs {}", trial, got, want);
  }
  const std::vector<double> hx = {1, 2, 3, 4}, hy = {0, 0, 1, 1};
  REQUIRE(stats::somers_d(hx, hy) == 4.0 / 6.0, "hand example gave {}", stats::somers_d(hx, hy));
  const std::vector<double> py = {0, 1, 2, 3};
  REQUIRE(stats::somers_d(hx, py) == 1.0, "perfect concordance gave {}", stats::somers_d(hx, py));

  // Under independence the permutation p-values should look uniform.
  constexpr int kReplicates = 500;
  std::vector<double> ps;
  for (int rep = 0; rep < kReplicates; ++rep) {
    const std::size_t n = 50;
    std::vector<double> x(n), y(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = static_cast<double>(rng() % 3);
    }
    ps.push_back(stats::permutation_p(x, y, 199, 1000 + rep));
  }
  std::sort(ps.begin(), ps.end());
  double ks = 0.0;
  for (int i = 0; i < kReplicates; ++i) {
    ks = std::max({ks, (i + 1.0) / kReplicates - ps[i], ps[i] - static_cast<double>(i) / kReplicates});
  }
  const double critical = 1.358 / std::sqrt(static_cast<double>(kReplicates));
  REQUIRE(ks < critical, "KS statistic {:.4f} >= {:.4f}", ks, critical);

  std::vector<double> cx(50), cy(50);
  std::iota(cx.begin(), cx.end(), 0.0);
  std::iota(cy.begin(), cy.end(), 0.0);
  const double p = stats::permutation_p(cx, cy, 10000, 7);
  REQUIRE(p <= 0.001, "concordant p = {}", p);
  return std::nullopt;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class MockServer {
 public:
  MockServer() {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    const std::string corpus = (kFixtures / "corpus.jsonl").string();
    std::vector<std::string> args = {CONNER_CLI, "serve-mock", "--corpus", corpus, "--port", "0"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    const int rc = posix_spawn(&pid_, CONNER_CLI, &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(fds[1]);
    if (rc != 0) throw std::runtime_error("cannot start serve-mock");
    std::string line;
    char c;
    while (read(fds[0], &c, 1) == 1 && c != '\n') line += c;
    close(fds[0]);
    const auto colon = line.rfind(':');
    if (line.rfind("listening on ", 0) != 0 || colon == std::string::npos) {
      throw std::runtime_error("unexpected serve-mock banner '" + line + "'");
    }
    url_ = "http://" + line.substr(13);
  }
  ~MockServer() {
    kill(pid_, SIGTERM);
    int status = 0;
    waitpid(pid_, &status, 0);
  }
  const std::string& url() const { return url_; }

 private:
  pid_t pid_ = 0;
  std::string url_;
};

int run_evaluate(const fs::path& config) {
  const auto cmd = fmt::format("\"{}\" evaluate -c \"{}\" > /dev/null 2>&1", CONNER_CLI,
                               config.string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end() {
  MockServer server;
  const auto root = fs::temp_directory_path() / "conner_acceptance_e2e";
  fs::remove_all(root);
  fs::create_directories(root);
  fs::copy_file(kFixtures / "nq20.jsonl", root / "nq20.jsonl");
  auto doc = json::parse(slurp(kFixtures / "run_mock.json"));
  doc["dataset"]["path"] = "nq20.jsonl";
  doc["backends"]["default"]["base_url"] = server.url();

  const char* outputs[] = {"items.jsonl", "report.json", "report.md"};
  std::vector<std::string> first;
  for (int run = 0; run < 3; ++run) {
    doc["cache_dir"] = fmt::format("cache{}", run);
    doc["output_dir"] = fmt::format("out{}", run);
    const auto cfg = root / fmt::format("run{}.json", run);
    std::ofstream(cfg) << doc.dump(2);
    const int rc = run_evaluate(cfg);
    REQUIRE(rc == 0, "run {} exited {}", run, rc);
    std::vector<std::string> got;
    for (const char* f : outputs) got.push_back(slurp(root / doc["output_dir"].get<std::string>() / f));
    REQUIRE(std::count(got[0].begin(), got[0].end(), '\n') == 20, "run {}: expected 20 items", run);
    if (run == 0) {
      first = got;
    } else {
      for (int k = 0; k < 3; ++k) {
        REQUIRE(got[k] == first[k], "run {}: {} differs from run 0", run, outputs[k]);
      }
    }
  }

  doc["cache_dir"] = "cache0";
  doc["output_dir"] = "warm";
  const auto cfg = root / "warm.json";
  std::ofstream(cfg) << doc.dump(2);
  const int rc = run_evaluate(cfg);
  REQUIRE(rc == 0, "warm run exited {}", rc);
  const auto manifest = json::parse(slurp(root / "warm" / "manifest.json"));
  const auto hits = manifest["cache"]["hits"].get<std::size_t>();
  const auto misses = manifest["cache"]["misses"].get<std::size_t>();
  const auto calls = manifest["backend_calls"].get<std::size_t>();
  REQUIRE(hits > 0 && misses == 0 && calls == 0, "warm run: {} hits, {} misses, {} calls",
          hits, misses, calls);
  for (int k = 0; k < 3; ++k) {
    REQUIRE(slurp(root / "warm" / outputs[k]) == first[k], "warm {} differs", outputs[k]);
  }
  return std::nullopt;
}

selection::IntrinsicScores scores_for(const std::string& text) {
  const auto h = std::hash<std::string>{}(text);
  auto unit = [&](int shift) { return static_cast<double>((h >> shift) & 0xFFFF) / 65535.0; };
  return {unit(0), unit(16), unit(32), unit(48)};
}

Outcome selection_properties() {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(0.0, 1.0), w(1e-3, 1.0);
  const auto q = Query::make("q", "which candidate is best");

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 2 + rng() % 5;
    const std::size_t dom = rng() % r;
    std::vector<selection::IntrinsicScores> table(r);
    table[dom] = {u(rng), u(rng), u(rng), u(rng)};
    for (std::size_t i = 0; i < r; ++i) {
      if (i == dom) continue;
      const auto& d = table[dom];
      table[i] = {d.fact_consistent * u(rng), d.rel * 0.999 * u(rng), d.coh_para * u(rng),
                  d.info * u(rng)};
    }
    std::vector<Knowledge> cands;
    for (std::size_t i = 0; i < r; ++i) cands.emplace_back("candidate " + std::to_string(i));
    const selection::QualityFn quality = [&](const Query&, const Knowledge& k) {
      return table[std::stoul(k.text().substr(10))];
    };
    const selection::Gamma gamma(w(rng), w(rng), w(rng), w(rng));
    const auto sel = selection::select_knowledge(q, cands, gamma, quality);
    REQUIRE(sel.index == dom, "gamma trial {}: picked {} over dominator {}", trial, sel.index, dom);
  }

  std::vector<selection::PoolEntry> pool;
  for (int i = 0; i < 40; ++i) {
    pool.push_back({Query::make(fmt::format("p{}", i), fmt::format("question {}", i)),
                    Knowledge(fmt::format("Knowledge passage number {}.", i))});
  }
  const selection::QualityFn quality = [](const Query&, const Knowledge& k) {
    return scores_for(k.text());
  };
  auto chosen_ids = [&](const selection::Gamma& g, std::uint64_t seed) {
    std::vector<std::size_t> ids;
    for (const auto& d : selection::select_demonstrations(pool, 30, 8, g, seed, quality).chosen) {
      ids.push_back(d.pool_index);
    }
    return ids;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const selection::Gamma g(w(rng), w(rng), w(rng), w(rng));
    const std::uint64_t seed = rng();
    const auto base = chosen_ids(g, seed);
    REQUIRE(chosen_ids(g, seed) == base, "trial {}: repeated run differs", trial);
    const double c = 0.01 + 100.0 * u(rng);
    REQUIRE(chosen_ids(g.scaled(c), seed) == base, "trial {}: scaling by {} changed order",
            trial, c);
  }
  return std::nullopt;
}

Outcome report_fixtures() {
  stats::CorpusRow r;
  r.group = {"DPR", "Supervised"};
  r.fact = stats::FactualityBreakdown{97.78, 2.23, 0.00};
  r.relevance_mean = 0.7514;
  r.coh_sent_mean = 0.0301;
  r.coh_para_mean = 0.7194;
  r.info_mean = 0.8965;
  r.helpfulness_mean = 0.1236;
  r.validity_pct = 36.86;
  stats::CorpusReport report;
  report.rows.push_back(r);
  const auto md = stats::render_markdown(report);
  const std::string row =
      "| DPR | Supervised | 97.78% | 2.23% | 0.00% | 0.7514 | 0.0301 | 0.7194 | 0.8965 | "
      "0.1236 | 36.86% |";
  REQUIRE(md.find(row) != std::string::npos, "DPR row missing from:\n{}", md);

  stats::CorpusRow before, after;
  before.group = {"ChatGPT", ""};
  before.helpfulness_mean = 0.1461;
  before.validity_pct = 43.45;
  after.group = {"ChatGPT", "select knowledge"};
  after.helpfulness_mean = 0.2090;
  after.validity_pct = 44.28;
  const std::vector<stats::CorpusRow> rows = {before, after};
  const auto ext = stats::render_extrinsic_markdown(rows);
  REQUIRE(ext.find("| ChatGPT | 0.1461 | 43.45% |") != std::string::npos &&
              ext.find("| ChatGPT (select knowledge) | 0.2090 | 44.28% |") != std::string::npos,
          "selection pair missing from:\n{}", ext);
  return std::nullopt;
}

Outcome baseline_metrics() {
  std::ifstream in(kFixtures / "baseline_pairs.jsonl");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto j = json::parse(line);
    const auto pred = j["pred"].get<std::string>();
    const auto golds = j["golds"].get<std::vector<std::string>>();
    const double want = j["f1"][0].get<double>() / j["f1"][1].get<double>();
    double f1 = 0.0;
    for (const auto& g : golds) f1 = std::max(f1, stats::unigram_f1(pred, g));
    const int em = stats::exact_match(pred, golds);
    REQUIRE(em == j["em"].get<int>(), "EM for '{}' was {}", pred, em);
    REQUIRE(std::abs(f1 - want) <= 1e-12, "F1 for '{}' was {}, want {}", pred, f1, want);
    ++rows;
  }
  REQUIRE(rows == 20, "fixture has {} pairs", rows);

  const std::vector<std::string> china = {"China"};
  REQUIRE(stats::exact_match("PRC", china) == 0, "PRC matched China");
  REQUIRE(stats::unigram_f1("PRC", "China") == 0.0, "PRC/China F1 nonzero");
  backend::Scorer scorer(std::make_shared<backend::MockBackend>());
  const auto q = Query::make("q", "what country was founded in 1949");
  const std::vector<Answer> refs = {Answer::make("China", AnswerKind::kSpan)};
  const double v = extrinsic::validity_span(scorer, q, Answer::make("PRC", AnswerKind::kSpan), refs);
  REQUIRE(v > 0.0, "mock validity for PRC was {}", v);
  return std::nullopt;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"factuality oracle", factuality_oracle},
      {"helpfulness properties", helpfulness_properties},
      {"informativeness closed form", informativeness_closed_form},
      {"coherence", coherence_properties},
      {"somers d", somers_properties},
      {"end-to-end determinism", end_to_end},
      {"selection", selection_properties},
      {"report fixtures", report_fixtures},
      {"baseline metrics", baseline_metrics},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome result;
    try {
      result = check();
    } catch (const std::exception& e) {
      result = std::string("exception: ") + e.what();
    }
    if (result) {
      ++failed;
      std::cout << "FAIL " << name << ": " << *result << std::endl;
    } else {
      std::cout << "PASS " << name << std::endl;
    }
  }
  return failed == 0 ? 0 : 1;
}
