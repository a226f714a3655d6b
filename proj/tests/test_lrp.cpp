#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gramsight/lrp.hpp"

using namespace gramsight;

namespace {

Mlp hand_net_2_2_1() {
  Mlp net;
  net.class_labels = {1};
  net.n_features = 2;
  net.hidden = 2;
  net.w1 = {0.5, -0.3,   // feature 0 -> hidden 0,1
            0.2, 0.4};   // feature 1 -> hidden 0,1
  net.w2 = {0.7, -0.6};  // hidden 0,1 -> output
  return net;
}

Mlp random_net(std::mt19937_64& rng, size_t inputs, size_t hidden, size_t outputs) {
  Mlp net;
  for (size_t k = 0; k < outputs; ++k) net.class_labels.push_back(static_cast<int>(k + 1));
  net.n_features = inputs;
  net.hidden = hidden;
  net.w1.resize(inputs * hidden);
  net.w2.resize(hidden * outputs);
  auto uni = [&] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5); };
  for (double& w : net.w1) w = uni();
  for (double& w : net.w2) w = uni();
  return net;
}

std::vector<uint32_t> random_row(std::mt19937_64& rng, size_t inputs) {
  std::vector<uint32_t> row;
  for (uint32_t f = 0; f < inputs; ++f)
    if (rng() % 2) row.push_back(f);
  if (row.empty()) row.push_back(static_cast<uint32_t>(rng() % inputs));
  return row;
}

}  // namespace

TEST_CASE("lrp: zero input row gives zero relevances", "[lrp]") {
  std::mt19937_64 rng(3);
  auto net = random_net(rng, 6, 5, 3);
  auto rel = lrp_relevances(net, {}, 1);
  CHECK(rel.total == 0.0);
  for (double r : rel.relevances) CHECK(r == 0.0);
}

TEST_CASE("lrp: hand-computed 2-2-1 trace", "[lrp]") {
  auto net = hand_net_2_2_1();
  std::vector<uint32_t> row = {0, 1};
  auto rel = lrp_relevances(net, row, 1);

  // frozen from the manual epsilon-rule computation
  CHECK(rel.total == Catch::Approx(0.363256647207041).margin(1e-12));
  REQUIRE(rel.relevances.size() == 2);
  CHECK(rel.relevances[0] == Catch::Approx(0.48158627533204046).margin(1e-12));
  CHECK(rel.relevances[1] == Catch::Approx(-0.11832962913135925).margin(1e-12));

  auto hidden = hidden_relevances(net, row, 1);
  REQUIRE(hidden.relevances.size() == 2);
  CHECK(hidden.relevances[0] == Catch::Approx(0.42305744281739033).margin(1e-12));
  CHECK(hidden.relevances[1] == Catch::Approx(-0.05980079661034941).margin(1e-12));
  CHECK(hidden.total == Catch::Approx(rel.total).margin(1e-15));
}

TEST_CASE("lrp: conservation across random nets for all three variants", "[lrp]") {
  std::mt19937_64 rng(2718);
  int accepted = 0;
  while (accepted < 60) {
    size_t inputs = 2 + rng() % 19;
    size_t outputs = 1 + rng() % 9;
    auto net = random_net(rng, inputs, 40, outputs);
    auto row = random_row(rng, inputs);
    int target = 1 + static_cast<int>(rng() % outputs);

    auto act = mlp_forward(net, row);
    size_t t = static_cast<size_t>(target - 1);
    if (std::abs(act.output_pre[t]) < 0.05) continue;  // non-degenerate target
    ++accepted;

    auto rel = lrp_relevances(net, row, target);
    CHECK(std::abs(rel.relevance_sum() - rel.total) <= 1e-6 * std::abs(rel.total) + 1e-9);

    auto hidden = hidden_relevances(net, row, target);
    CHECK(std::abs(hidden.relevance_sum() - hidden.total) <=
          1e-6 * std::abs(hidden.total) + 1e-9);

    size_t node = 1 + rng() % net.hidden;
    auto node_rel = input_relevances_for_hidden_node(net, row, node);
    CHECK(std::abs(node_rel.relevance_sum() - node_rel.total) <=
          1e-6 * std::abs(node_rel.total) + 1e-9);
    CHECK(node_rel.total == act.hidden_pre[node - 1]);
  }
}

TEST_CASE("hidden relevances: zero W2 gives zeros; defaults to predicted class", "[lrp]") {
  std::mt19937_64 rng(5);
  auto net = random_net(rng, 5, 4, 2);
  std::fill(net.w2.begin(), net.w2.end(), 0.0);
  std::vector<uint32_t> row = {0, 2};
  auto hidden = hidden_relevances(net, row);
  CHECK(hidden.total == 0.0);
  for (double r : hidden.relevances) CHECK(r == 0.0);

  auto net2 = random_net(rng, 5, 4, 3);
  auto h_default = hidden_relevances(net2, row);
  auto h_explicit = hidden_relevances(net2, row, predict(net2, row).label);
  CHECK(h_default.relevances == h_explicit.relevances);
}

TEST_CASE("hidden node input relevances: bounds and zero row", "[lrp]") {
  std::mt19937_64 rng(7);
  auto net = random_net(rng, 5, 4, 2);
  CHECK_THROWS_AS(input_relevances_for_hidden_node(net, {0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(input_relevances_for_hidden_node(net, {0}, 5), std::invalid_argument);
  auto rel = input_relevances_for_hidden_node(net, {}, 2);
  CHECK(rel.total == 0.0);
  for (double r : rel.relevances) CHECK(r == 0.0);
  CHECK(rel.target_kind == RelevanceVector::Target::hidden_node);
  CHECK(rel.target_id == 2);
}

TEST_CASE("avg abs relevances: zero model and single-row mean", "[lrp]") {
  std::mt19937_64 rng(11);
  auto net = random_net(rng, 4, 3, 2);

  std::vector<NGram> grams;
  for (int i = 0; i < 4; ++i)
    grams.push_back(NGram::from_hex("0000000000" + std::string(1, kHexDigits[i]) + "0"));
  FeatureVocabulary vocab(std::move(grams));

  BinaryFeatureMatrix m;
  m.n_features = 4;
  m.sample_ids = {"only"};
  m.rows = {{0, 2}};
  m.labels = {1};

  auto ranked = avg_abs_relevances(net, m, vocab);
  auto rel = lrp_relevances(net, m.rows[0], predict(net, m.rows[0]).label);
  for (const auto& e : ranked.entries) {
    uint32_t col = *vocab.column_of(e.ngram);
    CHECK(e.value == Catch::Approx(std::abs(rel.relevances[col])).margin(1e-15));
  }

  Mlp zero = net;
  std::fill(zero.w1.begin(), zero.w1.end(), 0.0);
  std::fill(zero.w2.begin(), zero.w2.end(), 0.0);
  auto zero_ranked = avg_abs_relevances(zero, m, vocab);
  for (const auto& e : zero_ranked.entries) CHECK(e.value == 0.0);
}

TEST_CASE("class avg relevances: single sample and empty signal", "[lrp]") {
  std::mt19937_64 rng(13);
  std::vector<NGram> grams;
  for (int i = 0; i < 4; ++i)
    grams.push_back(NGram::from_hex("0000000000" + std::string(1, kHexDigits[i]) + "0"));
  FeatureVocabulary vocab(std::move(grams));

  BinaryFeatureMatrix m;
  m.n_features = 4;
  m.sample_ids = {"a", "b"};
  m.rows = {{0, 1}, {2, 3}};
  m.labels = {1, 2};

  // search for a net that classifies sample a correctly as class 1
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto net = random_net(rng, 4, 3, 2);
    if (predict(net, m.rows[0]).label != 1) continue;
    auto ranked = class_avg_relevances(net, m, vocab, 1);
    REQUIRE(ranked.has_value());
    auto rel = lrp_relevances(net, m.rows[0], 1);
    for (const auto& e : ranked->entries) {
      uint32_t col = *vocab.column_of(e.ngram);
      CHECK(e.value == Catch::Approx(rel.relevances[col]).margin(1e-15));
    }
    break;
  }

  // no sample of class 3 exists at all
  std::mt19937_64 rng2(17);
  auto net = random_net(rng2, 4, 3, 3);
  CHECK_THROWS_AS(class_avg_relevances(net, m, vocab, 9), std::invalid_argument);
  BinaryFeatureMatrix none = m;
  none.labels = {3, 3};
  bool all_wrong = true;
  for (const auto& row : none.rows) all_wrong &= (predict(net, row).label != 3);
  if (all_wrong) CHECK(!class_avg_relevances(net, none, vocab, 3).has_value());
}
