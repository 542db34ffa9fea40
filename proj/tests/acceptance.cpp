// Acceptance suite: one check per release criterion, each printed as a
// PASS/FAIL line. Exit code is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "adaptqa/agreement.hpp"
#include "adaptqa/climate.hpp"
#include "adaptqa/evaluation.hpp"
#include "adaptqa/generation.hpp"
#include "adaptqa/retrieval.hpp"
#include "adaptqa/sample_data.hpp"
#include "adaptqa/text.hpp"
#include "helpers.hpp"

using namespace adaptqa;
using nlohmann::json;

namespace {

struct Check {
  std::string name;
  std::function<void()> run;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

// ---------------------------------------------------------------------------
// Shared fixture machinery

corpus::Chunk chunk_of(std::string id, std::string text,
                       std::vector<geo::GeoTag> geo = {}) {
  corpus::Chunk c;
  c.chunk_id = std::move(id);
  c.doc_id = c.chunk_id;
  c.text = std::move(text);
  c.geo = std::move(geo);
  c.span = {0, c.text.size()};
  return c;
}

struct RetrievalFixture {
  corpus::CorpusStore store;
  geo::Gazetteer gazetteer = testutil::fixture_gazetteer();
  llm::Gateway gateway;
  retrieval::SparseIndex sparse;
  retrieval::DenseIndex dense;

  explicit RetrievalFixture(int n_docs) {
    gateway.set_backoff_ms(0);
    gateway.set_embedding_backend(std::make_shared<llm::HashEmbedder>(64));
    static const char* vocab[] = {"rain", "wheat", "soil", "heat", "frost",
                                  "sow",  "yield", "dry",  "crop", "water"};
    std::mt19937_64 rng(3);
    for (int i = 0; i < n_docs; ++i) {
      std::string body;
      for (int w = 0; w < 25; ++w) {
        if (w) body += " ";
        body += vocab[rng() % 10];
      }
      auto doc = testutil::make_doc("d" + std::to_string(i), body);
      switch (i % 4) {
        case 0: doc.geo = {geo::GeoTag{"Australia", "Sydney"}}; break;
        case 1: doc.geo = {geo::GeoTag{"Australia", "Perth"}}; break;
        case 2: doc.geo = {geo::GeoTag{"France", "Paris"}}; break;
        default: break;  // untagged
      }
      store.add_document(doc, corpus::ChunkPolicy{300, 50});
    }
    sparse = retrieval::SparseIndex::build(store.chunks());
    dense = retrieval::DenseIndex::build(store.chunks(), gateway);
  }

  retrieval::Retriever retriever() {
    return retrieval::Retriever(store, sparse, dense, gazetteer, gateway);
  }
};

double bm25_oracle(const std::vector<corpus::Chunk>& chunks,
                   const std::vector<std::string>& query_terms, std::size_t idx,
                   const retrieval::Bm25Params& params) {
  std::vector<std::string> unique(query_terms);
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  const double n = static_cast<double>(chunks.size());
  double total_len = 0.0;
  for (const auto& c : chunks) total_len += text::tokenize(c.text).size();
  const double avgdl = total_len / n;
  const double dl = static_cast<double>(text::tokenize(chunks[idx].text).size());
  double score = 0.0;
  for (const auto& term : unique) {
    double df = 0.0;
    for (const auto& c : chunks) {
      auto toks = text::tokenize(c.text);
      if (std::find(toks.begin(), toks.end(), term) != toks.end()) df += 1.0;
    }
    if (df == 0.0) continue;
    auto toks = text::tokenize(chunks[idx].text);
    double tf = static_cast<double>(std::count(toks.begin(), toks.end(), term));
    if (tf == 0.0) continue;
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    score += idf * tf * (params.k1 + 1.0) /
             (tf + params.k1 * (1.0 - params.b + params.b * dl / avgdl));
  }
  return score;
}

double kappa_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  double table[4][4] = {};
  for (std::size_t i = 0; i < a.size(); ++i) table[a[i]][b[i]] += 1.0;
  double row[4] = {}, col[4] = {};
  double agreements = 0.0;
  for (int i = 0; i < 4; ++i) {
    agreements += table[i][i];
    for (int j = 0; j < 4; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
    }
  }
  double pe = 0.0;
  for (int c = 0; c < 4; ++c) pe += (row[c] / n) * (col[c] / n);
  const double po = agreements / n;
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

// ---------------------------------------------------------------------------
// Criteria

void criterion_eq1_endpoints() {
  RetrievalFixture fx(50);
  require(fx.store.chunks().size() == 50, "fixture must have 50 chunks");
  auto retriever = fx.retriever();
  const std::string question = "wheat yield under dry heat in Sydney";

  retrieval::HybridConfig config;
  config.k = 50;
  config.beta = 0.0;
  auto base_run = retriever.retrieve(question, config);
  require(base_run.size() == 50, "expected the full ranking back");
  auto by_base = base_run;
  std::sort(by_base.begin(), by_base.end(), [](const auto& a, const auto& b) {
    if (a.base_hybrid_score != b.base_hybrid_score) {
      return a.base_hybrid_score > b.base_hybrid_score;
    }
    return a.chunk_id < b.chunk_id;
  });
  for (std::size_t i = 0; i < base_run.size(); ++i) {
    require(base_run[i].chunk_id == by_base[i].chunk_id,
            "beta=0 ranking must equal the base-hybrid ranking");
  }

  config.beta = 1.0;
  auto loc_run = retriever.retrieve(question, config);
  auto by_loc = loc_run;
  std::sort(by_loc.begin(), by_loc.end(), [](const auto& a, const auto& b) {
    if (a.loc_sim != b.loc_sim) return a.loc_sim > b.loc_sim;
    return a.chunk_id < b.chunk_id;
  });
  for (std::size_t i = 0; i < loc_run.size(); ++i) {
    require(loc_run[i].chunk_id == by_loc[i].chunk_id,
            "beta=1 ranking must equal the LocSim ranking");
  }

  // Equal base score, one geo match: the matching chunk strictly outranks.
  corpus::CorpusStore pair_store;
  pair_store.add_document(
      testutil::make_doc("match", "wheat sowing advice for dry seasons",
                         {geo::GeoTag{"Australia", "Sydney"}}),
      corpus::ChunkPolicy{300, 50});
  pair_store.add_document(
      testutil::make_doc("other", "wheat sowing advice for dry seasons",
                         {geo::GeoTag{"France", "Paris"}}),
      corpus::ChunkPolicy{300, 50});
  auto pair_sparse = retrieval::SparseIndex::build(pair_store.chunks());
  auto pair_dense = retrieval::DenseIndex::build(pair_store.chunks(), fx.gateway);
  retrieval::Retriever pair_retriever(pair_store, pair_sparse, pair_dense,
                                      fx.gazetteer, fx.gateway);
  retrieval::HybridConfig boost;
  boost.beta = 0.3;
  boost.k = 2;
  auto ranked = pair_retriever.retrieve("wheat sowing in Sydney", boost);
  require(ranked.size() == 2, "expected both chunks back");
  require(ranked[0].base_hybrid_score == ranked[1].base_hybrid_score,
          "fixture must produce equal base scores");
  require(ranked[0].chunk_id == "match#0" &&
              ranked[0].final_score > ranked[1].final_score,
          "geo-matching chunk must strictly outrank at beta=0.3");
}

void criterion_bm25_oracle() {
  static const char* vocab[] = {"rain", "wheat", "soil", "heat", "frost",
                                "sow",  "yield", "dry",  "crop", "water"};
  std::mt19937_64 rng(9);
  std::vector<corpus::Chunk> chunks;
  for (int i = 0; i < 10; ++i) {
    std::string body;
    int words = 4 + static_cast<int>(rng() % 20);
    for (int w = 0; w < words; ++w) {
      if (w) body += " ";
      body += vocab[rng() % 10];
    }
    chunks.push_back(chunk_of("c" + std::to_string(i), body));
  }
  auto index = retrieval::SparseIndex::build(chunks);
  retrieval::Bm25Params params;

  std::vector<std::vector<std::string>> queries;
  for (const char* term : vocab) queries.push_back({term});
  queries.push_back({"rain", "wheat"});
  queries.push_back({"dry", "heat", "frost"});
  queries.push_back({"water", "water", "soil"});

  for (const auto& query : queries) {
    for (std::size_t idx = 0; idx < chunks.size(); ++idx) {
      double via_index = index.score(query, chunks[idx].chunk_id, params);
      double via_oracle = bm25_oracle(chunks, query, idx, params);
      double denom = std::max(1.0, std::abs(via_oracle));
      require(std::abs(via_index - via_oracle) / denom <= 1e-9,
              fmt::format("bm25 mismatch at chunk {} (index {} vs oracle {})",
                          chunks[idx].chunk_id, via_index, via_oracle));
    }
  }
}

void criterion_kappa_exhaustive() {
  require(eval::cohen_kappa({0, 0, 1, 1}, {1, 1, 0, 0}) == -1.0,
          "hand-derived case must give exactly -1");
  for (int length = 1; length <= 6; ++length) {
    std::vector<int> a(length, 0), b(length, 0);
    const long combos = static_cast<long>(std::pow(4, length));
    for (long ca = 0; ca < combos; ++ca) {
      long va = ca;
      for (int i = 0; i < length; ++i) {
        a[i] = static_cast<int>(va & 3);
        va >>= 2;
      }
      for (long cb = 0; cb < combos; ++cb) {
        long vb = cb;
        for (int i = 0; i < length; ++i) {
          b[i] = static_cast<int>(vb & 3);
          vb >>= 2;
        }
        double impl = eval::cohen_kappa(a, b);
        double oracle = kappa_oracle(a, b);
        if (impl != oracle) {
          throw std::runtime_error(
              fmt::format("kappa mismatch at length {} ({} vs {})", length,
                          impl, oracle));
        }
      }
    }
  }
}

void criterion_weight_arithmetic() {
  bool degenerate = false;
  auto weights = eval::kappa_weights({0.6, -0.2, 0.2}, &degenerate);
  require(!degenerate && weights[0] == 0.75 && weights[1] == 0.0 &&
              weights[2] == 0.25,
          "kappa (0.6,-0.2,0.2) must map to weights (0.75,0,0.25) exactly");

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng() % 6;
    std::vector<double> kappas(n);
    bool any = false;
    for (auto& k : kappas) {
      k = dist(rng);
      any = any || k > 0.0;
    }
    if (!any) kappas[rng() % n] = 0.3;
    auto w = eval::kappa_weights(kappas);
    double sum = 0.0;
    for (double x : w) {
      require(x >= 0.0, "weights must be non-negative");
      sum += x;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "weights must sum to 1 +- 1e-12");
  }

  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng() % 5;
    std::vector<double> kappas(n);
    bool any = false;
    for (auto& k : kappas) {
      k = dist(rng);
      any = any || k > 0.0;
    }
    if (!any) kappas[0] = 0.4;
    auto w = eval::kappa_weights(kappas);
    eval::HybridEvaluatorWeights hw;
    eval::DimensionWeights dw;
    eval::EvaluatorScores scores;
    int lo = 3, hi = 0;
    for (std::size_t m = 0; m < n; ++m) {
      std::string id = "m" + std::to_string(m);
      dw.by_evaluator[id] = w[m];
      int score = static_cast<int>(rng() % 4);
      scores[id]["accuracy"] = score;
      if (w[m] > 0.0) {
        lo = std::min(lo, score);
        hi = std::max(hi, score);
      }
    }
    hw.by_dimension["accuracy"] = dw;
    auto fused = eval::fuse_scores(scores, hw);
    double value = fused.by_dimension.at("accuracy");
    require(value >= lo - 1e-12 && value <= hi + 1e-12,
            "fused score must stay within contributing score bounds");
  }
}

void criterion_faithfulness_blend() {
  require(eval::hybrid_faithfulness(0.6, 0.8, 1.0) == 0.6,
          "alpha=1 must return s_ragas exactly");
  require(eval::hybrid_faithfulness(0.6, 0.8, 0.0) == 0.8,
          "alpha=0 must return s_llm exactly");
  require(eval::hybrid_faithfulness(0.6, 0.8, 0.5) == 0.7,
          "alpha=0.5 blend of (0.6, 0.8) must be exactly 0.7");
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double alpha = unit(rng);
    double a1 = unit(rng), a2 = unit(rng), l1 = unit(rng), l2 = unit(rng);
    double rlo = std::min(a1, a2), rhi = std::max(a1, a2);
    double llo = std::min(l1, l2), lhi = std::max(l1, l2);
    require(eval::hybrid_faithfulness(rhi, l1, alpha) >=
                eval::hybrid_faithfulness(rlo, l1, alpha),
            "blend must be monotone in s_ragas");
    require(eval::hybrid_faithfulness(a1, lhi, alpha) >=
                eval::hybrid_faithfulness(a1, llo, alpha),
            "blend must be monotone in s_llm");
  }
}

void criterion_verbalisation() {
  climate::ClimateRecord record;
  record.location = "Picton";
  record.variable = "rainfall";
  record.statistic = "mean_annual";
  record.value = 835;
  record.unit = "mm";
  record.provenance = "fixture";
  auto snippet = climate::verbalise(record);
  require(snippet.text == "the average rainfall in Picton is 835 mm",
          "verbalisation must render byte-exactly, got: " + snippet.text);
}

void criterion_loop_budget() {
  corpus::CorpusStore store;
  for (int i = 0; i < 4; ++i) {
    store.add_document(
        testutil::make_doc("d" + std::to_string(i),
                           testutil::synthetic_body(40, 100 + i)),
        corpus::ChunkPolicy{300, 50});
  }
  llm::Gateway gateway;
  gateway.set_backoff_ms(0);
  gateway.set_embedding_backend(std::make_shared<llm::HashEmbedder>(64));
  gateway.set_default_backend(testutil::scripted(
      {testutil::entry(llm::Purpose::generation, "", "Draft [1]."),
       testutil::entry(llm::Purpose::sufficiency, "",
                       "sufficient: no\nsubquestion: what else?")}));
  auto gaz = testutil::fixture_gazetteer();
  auto sparse = retrieval::SparseIndex::build(store.chunks());
  auto dense = retrieval::DenseIndex::build(store.chunks(), gateway);
  retrieval::Retriever retriever(store, sparse, dense, gaz, gateway);

  gen::LoopConfig config;
  config.max_iterations = 3;
  config.retrieval.k = 1;
  config.climate_enabled = false;
  gen::Services services;
  services.retriever = &retriever;
  services.gateway = &gateway;
  services.gazetteer = &gaz;

  auto result = gen::react_loop("dry season advice", config, services);
  require(result.trace.iterations.size() == 3,
          "adversarial judge must run exactly max_iterations=3 iterations");
  require(result.status == gen::AnswerStatus::budget_exhausted,
          "loop must flag the answer budget-exhausted");
  for (std::size_t i = 0; i < result.chain.size(); ++i) {
    require(result.chain.items()[i].ref_number == static_cast<int>(i) + 1,
            "refs must stay consecutive, never renumbered");
  }
  for (std::size_t i = 1; i < result.trace.iterations.size(); ++i) {
    require(result.trace.iterations[i].chain_size >=
                result.trace.iterations[i - 1].chain_size,
            "chain must never shrink across iterations");
  }
}

void criterion_end_to_end_determinism() {
  testutil::TempDir dir;
  sample::write_sample_workspace(dir.path());
  std::string cli = "'" + testutil::cli_path().string() + "'";
  auto ingest = testutil::run_command(cli + " ingest", dir.path());
  require(ingest.exit_code == 0, "ingest failed: " + ingest.output);
  std::string command =
      cli + " ask \"" + std::string(sample::kDemoQuestion) + "\"";
  auto first = testutil::run_command(command, dir.path());
  require(first.exit_code == 0, "ask failed: " + first.output);
  auto first_trace = testutil::read_file(dir.path() / "trace.json");
  require(!first_trace.empty(), "trace must be written");
  for (int run = 0; run < 2; ++run) {
    auto again = testutil::run_command(command, dir.path());
    require(again.exit_code == 0, "repeat ask failed");
    require(again.output == first.output,
            "answer, evidence list and citation report must be byte-identical");
    require(testutil::read_file(dir.path() / "trace.json") == first_trace,
            "trace must be byte-identical across runs");
  }
}

void criterion_citation_verification() {
  gen::EvidenceChain chain;
  chain.append(gen::EvidenceKind::literature, "c1", "one", "s");
  chain.append(gen::EvidenceKind::literature, "c2", "two", "s");
  chain.append(gen::EvidenceKind::literature, "c3", "three", "s");

  auto dangling = gen::verify_citations(
      gen::AnswerDraft::from_text("A crafted claim [4].", 1), chain);
  require(dangling.dangling == std::vector<int>{4},
          "citing [4] against a 3-item chain must report exactly one dangler");

  auto clean = gen::verify_citations(
      gen::AnswerDraft::from_text("First [1]. Second [2]. Third [3].", 1), chain);
  require(clean.clean(), "a fully cited draft must get a clean bill");

  double rate = eval::citation_rate(
      "One cited [1]. Two cited [2]. Three cited [3]. Four is not.");
  require(rate == 0.75, fmt::format("citation rate must be exactly 0.75, got {}", rate));
}

void criterion_bootstrap_ci() {
  auto make_labels = [](std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % 4);
      b[i] = (rng() % 3 != 0) ? a[i] : static_cast<int>(rng() % 4);
    }
    return std::make_pair(a, b);
  };

  auto [a, b] = make_labels(100, 1234);
  auto ci = eval::bootstrap_kappa_ci(a, b, 2000, 0.95, 42);
  auto ci_again = eval::bootstrap_kappa_ci(a, b, 2000, 0.95, 42);
  require(ci == ci_again, "seeded CI must be reproducible run to run");
  double point = eval::cohen_kappa(a, b);
  require(ci.first <= point && point <= ci.second,
          "CI must contain the point kappa on the 100-pair fixture");

  auto mean_width = [&](std::size_t n) {
    double total = 0.0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
      auto [la, lb] = make_labels(n, 9000 + trial);
      auto [lo, hi] = eval::bootstrap_kappa_ci(la, lb, 500, 0.95, trial);
      total += hi - lo;
    }
    return total / 20.0;
  };
  double width_small = mean_width(50);
  double width_large = mean_width(500);
  require(width_large < width_small,
          fmt::format("mean CI width must shrink with n (50: {}, 500: {})",
                      width_small, width_large));
}

void criterion_report_shape() {
  testutil::TempDir dir;
  sample::write_sample_workspace(dir.path());
  std::string cli = "'" + testutil::cli_path().string() + "'";
  auto calibrate = testutil::run_command(
      cli + " calibrate annotations.csv evaluator_scores.csv -o weights.json",
      dir.path());
  require(calibrate.exit_code == 0, "calibrate failed: " + calibrate.output);
  auto evaluate = testutil::run_command(
      cli + " evaluate answers.json weights.json -o report.csv", dir.path());
  require(evaluate.exit_code == 0, "evaluate failed: " + evaluate.output);

  auto csv = testutil::read_file(dir.path() / "report.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  require(header ==
              "Method,Context,Structure,Language,Citations,Specificity,"
              "Compreh.,Accuracy,AVG,CitRate,FaithRate",
          "report columns must match the published order, got: " + header);

  std::string line;
  int data_rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++data_rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    require(cells.size() == 11, "each data row must have 11 cells");
    for (int i = 1; i <= 8; ++i) {
      double mean = std::stod(cells[static_cast<std::size_t>(i)]);
      require(mean >= 0.0 && mean <= 3.0,
              fmt::format("column {} must be in [0,3], got {}", i, mean));
    }
    for (int i = 9; i <= 10; ++i) {
      double rate = std::stod(cells[static_cast<std::size_t>(i)]);
      require(rate >= 0.0 && rate <= 1.0,
              fmt::format("column {} must be in [0,1], got {}", i, rate));
    }
  }
  require(data_rows == 2, "fixture report must have one row per answer set");
}

}  // namespace

int main() {
  std::vector<Check> checks = {
      {"eq1 endpoints and monotone location boost", criterion_eq1_endpoints},
      {"bm25 index path matches from-scratch oracle", criterion_bm25_oracle},
      {"cohen kappa exhaustive oracle equivalence", criterion_kappa_exhaustive},
      {"kappa weight normalization and fusion bounds", criterion_weight_arithmetic},
      {"faithfulness blend endpoints and monotonicity", criterion_faithfulness_blend},
      {"verbalisation renders the canonical sentence", criterion_verbalisation},
      {"reasoning loop respects its iteration budget", criterion_loop_budget},
      {"end-to-end ask is byte-deterministic", criterion_end_to_end_determinism},
      {"citation verification and citation rate", criterion_citation_verification},
      {"bootstrap CI reproducible, calibrated and shrinking", criterion_bootstrap_ci},
      {"evaluation report matches the published shape", criterion_report_shape},
  };

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    try {
      checks[i].run();
      fmt::print("[PASS] {:>2}: {}\n", i + 1, checks[i].name);
    } catch (const std::exception& err) {
      ++failed;
      fmt::print("[FAIL] {:>2}: {} -- {}\n", i + 1, checks[i].name, err.what());
    }
  }
  fmt::print("{} of {} acceptance criteria passed\n", checks.size() - failed,
             checks.size());
  return failed;
}
