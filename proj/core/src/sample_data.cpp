#include "adaptqa/sample_data.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace adaptqa::sample {

using nlohmann::json;

const char* const kDemoQuestion =
    "How should wheat growers near Picton adapt to declining winter rainfall?";

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write fixture file: " + path.string());
  }
  out << content;
}

void write_corpus(const std::filesystem::path& path) {
  json docs = json::array();
  docs.push_back(json{
      {"doc_id", "d-wheat-picton"},
      {"title", "Wheat cropping under declining cool-season rainfall around Picton"},
      {"body",
       "Dryland wheat growers around Picton face a sustained decline in "
       "cool-season rainfall. Earlier sowing windows and drought-tolerant "
       "cultivars reduce exposure to terminal drought, and growers who shift "
       "sowing into late autumn capture more of the remaining winter rain. "
       "Crop monitoring over the past decade links declining winter rainfall "
       "to shallower root-zone moisture at anthesis, the stage most sensitive "
       "to water stress. Agronomists therefore recommend pairing an earlier "
       "sowing date with cultivars rated for drought tolerance, and budgeting "
       "nitrogen against a drier spring rather than the historical average."},
      {"geo", json::array({"Australia/Picton"})},
      {"year", 2021},
      {"source_url", "https://example.org/picton-wheat"}});
  docs.push_back(json{
      {"doc_id", "d-sowing-nsw"},
      {"title", "Sowing window shifts for dryland wheat in New South Wales"},
      {"body",
       "Field trials across New South Wales compared traditional and advanced "
       "sowing windows for dryland wheat. Sowing 10 to 14 days earlier "
       "preserved yield under drier springs in most trial seasons, provided "
       "frost risk at flowering was managed with cultivar choice. The trials "
       "show that earlier sowing lets the crop complete grain fill before the "
       "worst of the spring moisture deficit, while very early sowing exposed "
       "some cultivars to frost damage. Advisors should treat the sowing "
       "window as a lever that trades frost risk against drought escape."},
      {"geo", json::array({"Australia/New South Wales"})},
      {"year", 2022},
      {"source_url", "https://example.org/nsw-sowing"}});
  docs.push_back(json{
      {"doc_id", "d-stubble"},
      {"title", "Stubble retention and soil moisture conservation in Australian wheat systems"},
      {"body",
       "Retaining stubble conserves stored soil moisture through summer "
       "fallows in Australian wheat systems. Measurements across multiple "
       "sites show retained stubble reduces evaporation from the soil surface "
       "and improves infiltration of summer storms, carrying additional "
       "plant-available water into the following winter crop. The benefit is "
       "largest in seasons with below-average winter rainfall, when stored "
       "moisture buffers the crop between rain events. Burning or heavy "
       "cultivation forfeits most of this buffer."},
      {"geo", json::array({"Australia"})},
      {"year", 2020},
      {"source_url", "https://example.org/stubble"}});
  docs.push_back(json{
      {"doc_id", "d-cultivars"},
      {"title", "Drought-tolerant wheat cultivars: yield stability trials"},
      {"body",
       "Multi-season trials in Western Australia ranked wheat cultivars by "
       "yield stability under water-limited conditions. Drought-tolerant "
       "lines held 85 to 95 percent of their median yield in the driest "
       "tercile of seasons, while high-input cultivars fell below 70 percent. "
       "Cultivar selection is therefore one of the cheapest adaptations "
       "available to growers in drying climates, ahead of infrastructure "
       "investments such as irrigation."},
      {"geo", json::array({"Australia/Western Australia"})},
      {"year", 2023},
      {"source_url", "https://example.org/cultivars"}});
  docs.push_back(json{
      {"doc_id", "d-paris-cereal"},
      {"title", "Cereal heat stress adaptation in the Paris basin"},
      {"body",
       "Cereal growers in the Paris basin face rising heat stress during "
       "grain fill rather than rainfall decline. Adaptations centre on "
       "earlier phenology and heat-tolerant cultivars, with canopy "
       "temperature monitoring guiding irrigation where available. The "
       "experience of the Paris basin shows that adaptation levers differ by "
       "limiting factor: heat escape strategies do not transfer directly to "
       "moisture-limited systems."},
      {"geo", json::array({"France/Paris"})},
      {"year", 2019},
      {"source_url", "https://example.org/paris-cereal"}});
  docs.push_back(json{
      {"doc_id", "d-almond-ca"},
      {"title", "Pollination conditions for almond orchards in California"},
      {"body",
       "Almond orchards in California depend on a narrow pollination window "
       "in late winter. Ideal conditions combine daytime temperatures above "
       "13 degrees Celsius, light winds, and dry weather so bees fly freely. "
       "Growers adapt to climate variability by staggering cultivars with "
       "overlapping bloom and by contracting stronger hives per hectare in "
       "seasons with poor flight weather forecasts."},
      {"geo", json::array({"United States/California"})},
      {"year", 2018},
      {"source_url", "https://example.org/almond-pollination"}});

  std::string out;
  for (const auto& d : docs) out += d.dump() + "\n";
  write_file(path, out);
}

void write_gazetteer(const std::filesystem::path& path) {
  write_file(path,
             "# surface<TAB>Country/Adm1\n"
             "sydney\tAustralia/Sydney\n"
             "picton\tAustralia/Picton\n"
             "new south wales\tAustralia/New South Wales\n"
             "nsw\tAustralia/New South Wales\n"
             "perth\tAustralia/Perth\n"
             "western australia\tAustralia/Western Australia\n"
             "australia\tAustralia\n"
             "paris\tFrance/Paris\n"
             "france\tFrance\n"
             "california\tUnited States/California\n"
             "united states\tUnited States\n");
}

void write_catalog(const std::filesystem::path& path) {
  json catalog = {
      {"actions",
       json::array(
           {json{{"action_id", "precipitation"},
                 {"description", "rainfall statistics for a location"},
                 {"parameters",
                  json::array(
                      {json{{"name", "location"}, {"type", "location"}, {"required", true}},
                       json{{"name", "statistic"},
                            {"type", "choice"},
                            {"required", true},
                            {"allowed", json::array({"mean_annual", "total_annual", "trend"})}}})}},
            json{{"action_id", "temperature"},
                 {"description", "temperature statistics for a location"},
                 {"parameters",
                  json::array(
                      {json{{"name", "location"}, {"type", "location"}, {"required", true}},
                       json{{"name", "statistic"},
                            {"type", "choice"},
                            {"required", true},
                            {"allowed", json::array({"mean_annual", "maximum", "minimum"})}}})}},
            json{{"action_id", "crop_yield"},
                 {"description", "crop yield indicators for a location"},
                 {"parameters",
                  json::array(
                      {json{{"name", "location"}, {"type", "location"}, {"required", true}},
                       json{{"name", "crop"}, {"type", "text"}, {"required", true}},
                       json{{"name", "statistic"},
                            {"type", "choice"},
                            {"required", true},
                            {"allowed", json::array({"mean", "trend"})}}})}}})}};
  write_file(path, catalog.dump(2) + "\n");
}

void write_climate_fixtures(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json precipitation = {
      {"records",
       {{"location=Picton&statistic=mean_annual",
         json::array({json{{"location", "Picton"},
                           {"variable", "rainfall"},
                           {"statistic", "mean_annual"},
                           {"value", 835},
                           {"unit", "mm"}}})},
        {"location=Sydney&statistic=mean_annual",
         json::array({json{{"location", "Sydney"},
                           {"variable", "rainfall"},
                           {"statistic", "mean_annual"},
                           {"value", 1213},
                           {"unit", "mm"}}})}}}};
  write_file(dir / "precipitation.json", precipitation.dump(2) + "\n");

  json temperature = {
      {"records",
       {{"location=Picton&statistic=mean_annual",
         json::array({json{{"location", "Picton"},
                           {"variable", "temperature"},
                           {"statistic", "mean_annual"},
                           {"value", 16.4},
                           {"unit", "degrees Celsius"},
                           {"period", "1990-2020"}}})}}}};
  write_file(dir / "temperature.json", temperature.dump(2) + "\n");
}

const char* kDemoAnswer =
    "Wheat growers near Picton should pair earlier sowing windows with "
    "drought-tolerant cultivars as cool-season rainfall declines [1]. Trials "
    "in New South Wales show that sowing 10 to 14 days earlier preserves "
    "yield under drier springs [2]. Retaining stubble conserves stored soil "
    "moisture through summer fallows, buffering the crop in dry winters [3]. "
    "With the average rainfall in Picton at 835 mm and trending down, "
    "moisture conservation remains worthwhile in most seasons [7].";

void write_scripted_fixture(const std::filesystem::path& path) {
  json entries = json::array();
  entries.push_back(json{{"purpose", "action-select"},
                         {"match", "declining winter rainfall"},
                         {"response", "action: precipitation"}});
  entries.push_back(json{{"purpose", "param-fill"},
                         {"match", "precipitation"},
                         {"response", "location: Picton\nstatistic: mean_annual"}});
  entries.push_back(json{{"purpose", "generation"},
                         {"match", "declining winter rainfall"},
                         {"response", kDemoAnswer}});
  entries.push_back(json{{"purpose", "sufficiency"}, {"response", "sufficient: yes"}});

  // Rubric scoring, matched per dimension definition.
  auto rubric = [&](const char* match, const char* score) {
    entries.push_back(
        json{{"purpose", "rubric"}, {"match", match}, {"response", score}});
  };
  rubric("Context:", "3");
  rubric("Structure:", "3");
  rubric("Language:", "3");
  rubric("Comprehensiveness:", "2");
  rubric("Specificity:", "2");
  rubric("Citations:", "3");
  rubric("Accuracy:", "3");

  // Claim decomposition for the bundled answers file.
  entries.push_back(json{
      {"purpose", "claims"},
      {"match", "pair earlier sowing windows"},
      {"response",
       "claim: earlier sowing windows and drought-tolerant cultivars reduce "
       "exposure to declining cool-season rainfall\n"
       "claim: the average rainfall in Picton is 835 mm"}});
  entries.push_back(json{
      {"purpose", "claims"},
      {"match", "water them generously"},
      {"response",
       "claim: wheat should be watered generously every week\n"
       "claim: rainfall decline can be ignored for planning"}});
  entries.push_back(json{{"purpose", "faithfulness"}, {"response", "0.8"}});

  json doc = {{"strict", false},
              {"fallback", "sufficient: yes"},
              {"entries", entries}};
  write_file(path, doc.dump(2) + "\n");
}

// Calibration fixture: one consensus label list (three agreeing annotators)
// and three evaluators whose agreement is exact by construction, giving
// closed-form reliability weights.
const int kConsensus[10] = {0, 1, 2, 3, 0, 1, 2, 3, 0, 1};
const int kEvalKappa06[10] = {0, 0, 2, 2, 0, 1, 2, 3, 0, 2};   // kappa = 0.6
const int kEvalKappaNeg02[10] = {0, 0, 0, 0, 1, 2, 3, 2, 2, 2};  // kappa = -0.2
const int kEvalKappa02[10] = {0, 0, 0, 0, 0, 2, 2, 3, 2, 2};   // kappa = 0.2

const char* kDimensions[7] = {"context",     "structure",  "language",
                              "comprehensiveness", "specificity",
                              "citations",   "accuracy"};

void write_annotations(const std::filesystem::path& path) {
  std::string out = "question_id,answer_id,annotator_id,dimension,score\n";
  for (const char* annotator : {"ann-1", "ann-2", "ann-3"}) {
    for (const char* dim : kDimensions) {
      for (int i = 0; i < 10; ++i) {
        out += "q" + std::to_string(i + 1) + ",a1," + annotator + "," + dim +
               "," + std::to_string(kConsensus[i]) + "\n";
      }
    }
  }
  write_file(path, out);
}

void write_evaluator_scores(const std::filesystem::path& path) {
  std::string out = "question_id,answer_id,evaluator_id,dimension,score\n";
  auto emit = [&](const char* evaluator, const char* dim, const int* labels) {
    for (int i = 0; i < 10; ++i) {
      out += "q" + std::to_string(i + 1) + ",a1," + evaluator + "," + dim + "," +
             std::to_string(labels[i]) + "\n";
    }
  };
  for (const char* dim : kDimensions) {
    const bool accuracy = std::string(dim) == "accuracy";
    const bool citations = std::string(dim) == "citations";
    // gemini-flash-eval agrees perfectly except on accuracy (kappa 0.6).
    emit("gemini-flash-eval", dim, accuracy ? kEvalKappa06 : kConsensus);
    // gpt-mini-eval is below chance on accuracy and citations, else 0.6.
    emit("gpt-mini-eval", dim,
         (accuracy || citations) ? kEvalKappaNeg02 : kEvalKappa06);
    // deepseek-eval is weakly aligned except citations (below chance).
    emit("deepseek-eval", dim, citations ? kEvalKappaNeg02 : kEvalKappa02);
  }
  write_file(path, out);
}

void write_answers(const std::filesystem::path& path) {
  json evidence = json::array(
      {json{{"kind", "literature"},
            {"text",
             "Earlier sowing windows and drought-tolerant cultivars reduce "
             "exposure to terminal drought under declining cool-season "
             "rainfall."},
            {"source", "Wheat cropping under declining cool-season rainfall "
                       "around Picton (2021)"}},
       json{{"kind", "data"},
            {"text", "the average rainfall in Picton is 835 mm"},
            {"source", "fixture:precipitation?location=Picton&statistic=mean_annual"}}});
  json sets = {
      {"sets",
       json::array(
           {json{{"name", "assisted"},
                 {"answers",
                  json::array({json{
                      {"answer_id", "assisted-1"},
                      {"question", kDemoQuestion},
                      {"text",
                       "Growers should pair earlier sowing windows with "
                       "drought-tolerant cultivars [1]. The average rainfall "
                       "in Picton is 835 mm [2]."},
                      {"evidence", evidence}}})}},
            json{{"name", "baseline"},
                 {"answers",
                  json::array({json{
                      {"answer_id", "baseline-1"},
                      {"question", kDemoQuestion},
                      {"text",
                       "Wheat needs water, so water them generously every "
                       "week. Rainfall decline can be ignored for planning."},
                      {"evidence", evidence}}})}}})}};
  write_file(path, sets.dump(2) + "\n");
}

void write_config(const std::filesystem::path& path) {
  json config = {
      {"paths",
       {{"corpus", "corpus.jsonl"},
        {"gazetteer", "gazetteer.tsv"},
        {"catalog", "catalog.json"},
        {"climate_fixtures", "climate"},
        {"scripted_fixture", "scripted.json"},
        {"index", "index.json"},
        {"weights", "weights.json"},
        {"trace", "trace.json"}}},
      {"retrieval", {{"lambda", 0.5}, {"beta", 0.3}, {"k", 8}}},
      {"chunking", {{"size_words", 300}, {"overlap_words", 50}}},
      {"loop", {{"max_iterations", 3}, {"max_subq", 2}, {"climate", true}}},
      {"eval",
       {{"alpha", 0.5},
        {"theta", 0.6},
        {"bootstrap_resamples", 500},
        {"bootstrap_level", 0.95},
        {"seed", 42},
        {"mode", "zero-shot"},
        {"evaluators",
         json::array({"gemini-flash-eval", "gpt-mini-eval", "deepseek-eval"})}}},
      {"backends",
       {{"default", "scripted"},
        {"backoff_ms", 0},
        {"models",
         {{"generation", "demo-generator"},
          {"sufficiency", "demo-judge"},
          {"rubric", "demo-evaluator"}}}}}};
  write_file(path, config.dump(2) + "\n");
}

}  // namespace

void write_sample_workspace(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_corpus(dir / "corpus.jsonl");
  write_gazetteer(dir / "gazetteer.tsv");
  write_catalog(dir / "catalog.json");
  write_climate_fixtures(dir / "climate");
  write_scripted_fixture(dir / "scripted.json");
  write_annotations(dir / "annotations.csv");
  write_evaluator_scores(dir / "evaluator_scores.csv");
  write_answers(dir / "answers.json");
  write_config(dir / "config.json");
}

}  // namespace adaptqa::sample
