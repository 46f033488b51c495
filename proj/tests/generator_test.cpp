#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "support.hpp"

using namespace mindgames;
using namespace testing_support;

namespace {

std::vector<CellSet> reference_winning_sets(const Instance& in) {
  const auto g = oracle_game(in);
  const unsigned h = oracle_mask(in.hidden);
  std::vector<CellSet> out;
  for (unsigned s = 0; s < 512; ++s) {
    if ((s & ~h) != 0) continue;
    if (oracle::choice_after_batch(g, h, s, in.initial_choice) == in.goal) out.push_back(from_oracle_mask(s));
  }
  std::sort(out.begin(), out.end(), [](CellSet a, CellSet b) { return size_lex_less(a, b); });
  return out;
}

}  // namespace

TEST(Conditions, worked_example_is_valid) {
  EXPECT_TRUE(check_conditions(worked_example()));
  Instance broken = worked_example();
  broken.reveal = CellSet{kAd};
  EXPECT_FALSE(check_conditions(broken));
}

// Valid labelings are rare, so every hidden set (up to four cells) and every
// reveal subset of it is checked for each random game.
TEST(Conditions, derived_labels_match_reference) {
  std::mt19937_64 rng(3);
  int valid = 0;
  for (int i = 0; i < 1500; ++i) {
    Instance in = random_instance(rng);
    for (unsigned h = 0; h < 512; ++h) {
      in.hidden = CellSet(static_cast<std::uint16_t>(h));
      if (in.hidden.size() > 4) continue;
      for (unsigned r = h;; r = (r - 1) & h) {
        in.reveal = CellSet(static_cast<std::uint16_t>(r));
        const auto lib = derive_choices(in.values, in.matrix, in.hidden, in.reveal);
        const auto ref = oracle::labels(oracle_game(in), oracle_mask(in.hidden), oracle_mask(in.reveal));
        ASSERT_EQ(lib.has_value(), ref[0] >= 0);
        if (lib) {
          ++valid;
          EXPECT_EQ(lib->goal, ref[0]);
          EXPECT_EQ(lib->initial_choice, ref[1]);
          EXPECT_EQ(lib->full_info_choice, ref[2]);
        }
        if (r == 0) break;
      }
    }
  }
  EXPECT_GT(valid, 50);
}

TEST(WinningSets, worked_example) {
  const auto w = winning_sets(worked_example());
  const std::vector<CellSet> expected = {CellSet{kAd, kCd}, CellSet{kAd, kBd, kCd}, CellSet{kAd, kBt, kCd}};
  EXPECT_EQ(w, expected);
  EXPECT_FALSE(has_goal_only_winning_set(worked_example(), w));
}

TEST(WinningSets, match_reference_on_random_games) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 500; ++i) {
    Instance in = random_instance(rng);
    in.hidden = CellSet(static_cast<std::uint16_t>(rng() % 512));
    in.initial_choice = argmax_set(evaluate_utilities(in.matrix, in.values, in.hidden.complement())).items().front();
    EXPECT_EQ(winning_sets(in), reference_winning_sets(in));
  }
}

TEST(Counts, two_attributes_match_exhaustive_reference_uncapped) {
  const auto lib = count_configurations(2, -1);
  const auto ref = oracle::count_two_attributes(-1);
  EXPECT_EQ(lib.labeled_hidden_sets, ref.labeled_hidden);
  EXPECT_EQ(lib.labeled_tuples, ref.labeled_tuples);
  EXPECT_EQ(lib.relabeled_hidden_sets, ref.relabeled_hidden);
  EXPECT_EQ(lib.relabeled_tuples, ref.relabeled_tuples);
}

TEST(Counts, two_attributes_match_exhaustive_reference_capped) {
  const auto lib = count_configurations(2, 4);
  const auto ref = oracle::count_two_attributes(4);
  EXPECT_EQ(lib.labeled_hidden_sets, ref.labeled_hidden);
  EXPECT_EQ(lib.labeled_tuples, ref.labeled_tuples);
  EXPECT_EQ(lib.relabeled_hidden_sets, ref.relabeled_hidden);
  EXPECT_EQ(lib.relabeled_tuples, ref.relabeled_tuples);
}

// Regression values; the first is the published two-attribute figure.
TEST(Counts, pinned_regression_values) {
  const auto two = count_configurations(2, -1);
  EXPECT_EQ(two.relabeled_hidden_sets, 56u);
  EXPECT_EQ(two.labeled_hidden_sets, 672u);
  EXPECT_EQ(two.labeled_tuples, 960u);
  EXPECT_EQ(two.relabeled_tuples, 80u);

  const auto two_capped = count_configurations(2, 4);
  EXPECT_EQ(two_capped.labeled_tuples, 288u);
  EXPECT_EQ(two_capped.relabeled_tuples, 24u);

  const auto three = count_configurations(3, 4);
  EXPECT_EQ(three.labeled_tuples, 91152u);
  EXPECT_EQ(three.labeled_hidden_sets, 91152u);
  EXPECT_EQ(three.relabeled_tuples, 2534u);
}

TEST(Counts, three_attributes_uncapped_in_the_tens_of_thousands) {
  const auto three = count_configurations(3, -1);
  EXPECT_EQ(three.relabeled_hidden_sets, 40930u);
  EXPECT_GE(three.relabeled_hidden_sets, 10000u);
}

TEST(Enumeration, streams_every_valid_configuration) {
  GeneratorParams p;
  std::uint64_t seen = 0;
  std::set<std::string> ids;
  const auto n = enumerate_instances(p, [&](const Instance& in) {
    ++seen;
    if (seen % 97 == 0) {
      EXPECT_TRUE(check_conditions(in)) << in.id;
      ids.insert(in.id);
    }
  });
  EXPECT_EQ(n, seen);
  EXPECT_EQ(n, 91152u);
  EXPECT_GE(n, 10000u);
  EXPECT_EQ(ids.size(), seen / 97);
}

TEST(Enumeration, rejects_two_attribute_instances) {
  GeneratorParams p;
  p.num_attributes = 2;
  EXPECT_THROW(enumerate_instances(p, [](const Instance&) {}), Error);
}

TEST(Sampling, critical_instances_satisfy_every_condition) {
  const auto& sample = critical_sample();
  ASSERT_EQ(sample.size(), 100u);
  std::set<std::string> ids;
  for (const auto& in : sample) {
    ids.insert(in.id);
    EXPECT_TRUE(check_conditions(in)) << in.id;
    EXPECT_EQ(in.hidden.size(), 4);
    EXPECT_EQ(in.reveal.size(), 2);
    const auto w = winning_sets(in);
    EXPECT_NE(std::find(w.begin(), w.end(), in.reveal), w.end());
    EXPECT_EQ(w, std::vector<CellSet>{in.reveal});
    EXPECT_FALSE(has_goal_only_winning_set(in, w));
    const KnowledgeState all = simulate_disclosure(initial_state(in), in.matrix, in.values, in.hidden);
    EXPECT_NE(all.current_choice(), in.goal);
    EXPECT_EQ(all.current_choice(), in.full_info_choice);
  }
  EXPECT_EQ(ids.size(), 100u);
}

TEST(Sampling, deterministic_and_round_robin_over_scenarios) {
  GeneratorParams p;
  p.sample_count = 10;
  p.seed = 77;
  const auto a = sample_critical(p);
  const auto b = sample_critical(p);
  EXPECT_EQ(a, b);
  const auto ids = mental_scenario_ids();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].scenario.id, ids[i % ids.size()]);
  p.seed = 78;
  EXPECT_NE(sample_critical(p), a);
}

TEST(Sampling, insufficient_candidates_is_an_error) {
  GeneratorParams p;
  p.sample_count = 1000000;
  try {
    sample_critical(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientInstances);
  }
}

TEST(Sampling, relaxed_filters_admit_more_candidates) {
  GeneratorParams strict;
  strict.sample_count = 1;
  GeneratorParams relaxed = strict;
  relaxed.require_exact_reveal_structure = false;
  std::uint64_t n_strict = 0, n_relaxed = 0;
  for_each_configuration<kNumAttributes>(kMaxHidden, [&](const Configuration<kNumAttributes>& cfg) {
    if (cfg.hidden.size() != 4 || cfg.reveal.size() != 2) return;
    const Instance in = make_instance(cfg, find_scenario("llm"));
    n_strict += passes_critical_filters(in, strict);
    n_relaxed += passes_critical_filters(in, relaxed);
  });
  EXPECT_GT(n_strict, 100u);
  EXPECT_GT(n_relaxed, n_strict);
}

TEST(Instances, id_encodes_configuration) {
  const auto& in = critical_sample().front();
  EXPECT_EQ(in.id.rfind(in.scenario.id + ":", 0), 0u);
  EXPECT_EQ(in.id, in.scenario.id + ":" + configuration_code(in.values, in.matrix, in.hidden, in.reveal));
}
