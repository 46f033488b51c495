#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace mindgames;
using namespace testing_support;

namespace {

// Plays `agent` against the target without the referee; returns the turn
// on which the goal was first chosen, or 0.
int drive(Persuader& agent, const Instance& in, Condition cond, std::vector<std::string>* texts = nullptr) {
  KnowledgeState state = initial_state(in);
  PersuaderContext ctx;
  ctx.view = render_persuader_view(in, cond);
  int first = 0;
  for (int turn = 1; turn <= kNumTurns; ++turn) {
    ctx.turn = turn;
    PersuaderMessage m = agent.step(ctx);
    if (texts) texts->push_back(m.text);
    auto [next, reply] = respond(std::move(state), in, *m.structured);
    state = std::move(next);
    agent.observe(reply);
    if (!first && state.current_choice() == in.goal) first = turn;
  }
  return state.current_choice() == in.goal ? first : 0;
}

}  // namespace

TEST(Analytic, closed_form_values) {
  EXPECT_DOUBLE_EQ(analytic_win_probability(0), 0.0);
  EXPECT_DOUBLE_EQ(analytic_win_probability(1), 0.0);
  EXPECT_NEAR(analytic_win_probability(2), 2.0 / 81.0, 1e-15);
  EXPECT_NEAR(analytic_win_probability(6), 0.0752, 5e-5);
  const auto f = analytic_baseline_factors(6);
  EXPECT_NEAR(f.no_incorrect, std::pow(7.0 / 9.0, 6), 1e-15);
  EXPECT_NEAR(f.no_incorrect * f.both_correct_given_no_incorrect, f.probability, 1e-15);
  EXPECT_THROW(analytic_win_probability(-1), Error);
}

TEST(Analytic, six_draws_is_the_best_schedule) {
  int best = 0;
  for (int n = 0; n <= 50; ++n)
    if (analytic_win_probability(n) > analytic_win_probability(best)) best = n;
  EXPECT_EQ(best, 6);
}

TEST(Analytic, factored_and_expanded_forms_agree) {
  for (int n = 0; n <= 60; ++n)
    EXPECT_NEAR(analytic_win_probability(n), analytic_win_probability_expanded(n), 1e-12) << n;
}

// On an instance with exactly two required and two poison hidden cells the
// closed form is the exact probability; check it against the enumerator.
TEST(Analytic, matches_exhaustive_draw_enumeration) {
  const Instance& in = critical_sample().front();
  const auto g = oracle_game(in);
  for (int n = 0; n <= 5; ++n) {
    const double exact = oracle::enumerate_baseline_win(g, oracle_mask(in.hidden), in.initial_choice, in.goal, n);
    EXPECT_NEAR(analytic_win_probability(n), exact, 1e-12) << n;
    EXPECT_NEAR(oracle::exact_baseline_win(g, oracle_mask(in.hidden), in.initial_choice, in.goal, n), exact,
                1e-12);
  }
}

TEST(RandomBaseline, seeded_draws_and_schedules) {
  const Instance in = worked_example();
  RandomBaselinePersuader a(6, 42), b(6, 42), c(6, 43);
  EXPECT_EQ(a.draws(), b.draws());
  EXPECT_NE(a.draws(), c.draws());
  ASSERT_EQ(a.draws().size(), 6u);

  PersuaderContext ctx;
  ctx.view = render_persuader_view(in, Condition::kHidden);
  ctx.channel = Channel::kStructured;
  const auto first = a.step(ctx);
  CellSet expected;
  for (Cell x : a.draws()) expected.insert(x);
  EXPECT_EQ(first.structured->disclosed_cells(), expected);
  for (const auto& d : first.structured->disclosures) EXPECT_EQ(d.claimed_effect, in.matrix.at(d.cell));
  ctx.turn = 2;
  EXPECT_TRUE(a.step(ctx).structured->empty());
  EXPECT_EQ(a.step(ctx).text, "Okay.");

  RandomBaselinePersuader rr(10, 42, BaselineSchedule::kRoundRobin);
  int total = 0;
  for (int t = 1; t <= kNumTurns; ++t) {
    ctx.turn = t;
    const auto m = rr.step(ctx);
    const int expected_count = t <= 2 ? 2 : 1;
    EXPECT_LE(static_cast<int>(m.structured->disclosures.size()), expected_count);
    const CellSet due = t <= 2 ? CellSet{rr.draws()[t - 1], rr.draws()[t + 7]} : CellSet{rr.draws()[t - 1]};
    EXPECT_EQ(m.structured->disclosed_cells(), due);
    total += static_cast<int>(m.structured->disclosures.size());
  }
  EXPECT_GE(total, 8);
  EXPECT_THROW(RandomBaselinePersuader(-1, 0), Error);
}

TEST(RandomBaseline, draws_are_roughly_uniform) {
  std::array<int, 9> hist{};
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    RandomBaselinePersuader p(9, seed);
    for (Cell c : p.draws()) ++hist[static_cast<std::size_t>(cell_index<3>(c))];
  }
  for (int h : hist) EXPECT_NEAR(h, 2000, 200);
}

TEST(Planning, minimal_winning_set_on_worked_example) {
  const Instance in = worked_example();
  EXPECT_EQ(plan_bruteforce(initial_state(in), in), (CellSet{kAd, kCd}));
}

TEST(Planning, empty_plan_when_goal_already_chosen) {
  const Instance in = worked_example();
  const KnowledgeState s = simulate_disclosure(initial_state(in), in.matrix, in.values, in.reveal);
  EXPECT_EQ(plan_bruteforce(s, in), CellSet{});
}

TEST(Planning, sink_has_no_plan) {
  const Instance in = worked_example();
  const KnowledgeState s = simulate_disclosure(initial_state(in), in.matrix, in.values, in.hidden);
  try {
    plan_bruteforce(s, in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoWinningSet);
  }
}

TEST(Planning, plan_is_a_smallest_winning_set_on_sampled_instances) {
  for (const auto& in : critical_sample()) {
    const CellSet plan = plan_bruteforce(initial_state(in), in);
    EXPECT_EQ(plan, in.reveal) << in.id;
  }
}

TEST(Agents, scripted_perfect_game_on_worked_example) {
  const Instance in = worked_example();
  ScriptedPerfectPersuader agent;
  std::vector<std::string> texts;
  EXPECT_EQ(drive(agent, in, Condition::kHidden, &texts), 3);
  ASSERT_EQ(texts.size(), 8u);
  EXPECT_EQ(texts[0], "What do you know about the proposals? Which attributes do you like?");
  EXPECT_EQ(texts[1], "What is your preferred proposal?");
  EXPECT_EQ(texts[2], "Proposal A will decrease development speed. Proposal C will increase development speed.");
  EXPECT_EQ(texts[3], "Okay.");
}

TEST(Agents, bruteforce_wins_on_turn_one_when_target_is_visible) {
  for (const auto& in : critical_sample()) {
    BruteForcePersuader agent;
    EXPECT_EQ(drive(agent, in, Condition::kRevealed), 1) << in.id;
  }
}

TEST(Agents, bruteforce_wins_on_turn_two_when_hidden) {
  for (const auto& in : critical_sample()) {
    BruteForcePersuader agent;
    EXPECT_EQ(drive(agent, in, Condition::kHidden), 2) << in.id;
  }
}

TEST(Agents, scripted_wins_every_sampled_instance_by_turn_three) {
  for (const auto& in : critical_sample()) {
    ScriptedPerfectPersuader agent;
    const int t = drive(agent, in, Condition::kHidden);
    EXPECT_GE(t, 1) << in.id;
    EXPECT_LE(t, 3) << in.id;
  }
}

TEST(Agents, discrete_channel_emits_json) {
  const Instance in = worked_example();
  PersuaderContext ctx;
  ctx.view = render_persuader_view(in, Condition::kHidden);
  ctx.channel = Channel::kDiscrete;
  ScriptedPerfectPersuader agent;
  const auto m = agent.step(ctx);
  EXPECT_EQ(parse_discrete_action(m.text, in.scenario), *m.structured);
}

TEST(ModelOutput, split_on_first_delimiter) {
  const auto m = split_completion("  I should ask first.\n---\n What do you like? --- really ");
  EXPECT_EQ(m.chain_of_thought, "I should ask first.");
  EXPECT_EQ(m.text, "What do you like? --- really");
  EXPECT_FALSE(m.format_violation);

  const auto missing = split_completion("Just a message");
  EXPECT_TRUE(missing.format_violation);
  EXPECT_EQ(missing.text, "Just a message");

  const auto long_msg = split_completion("x---" + std::string(500, 'y'));
  EXPECT_EQ(long_msg.text.size(), 300u);

  try {
    split_completion(" \n ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCompletion);
  }
}

TEST(ModelOutput, client_failure_is_model_unavailable) {
  QueueModel empty({});
  try {
    model_persuader_step("prompt", empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModelUnavailable);
  }
}

TEST(Prompt, hidden_and_revealed_views) {
  const Instance in = worked_example();
  const std::string hidden = assemble_prompt(in, Condition::kHidden, Variant::kDefault, {});
  const std::string revealed = assemble_prompt(in, Condition::kRevealed, Variant::kDefault, {});
  EXPECT_TRUE(hidden.starts_with(std::string(kInstructionsPrompt)));
  EXPECT_NE(hidden.find("### Response format"), std::string::npos);
  EXPECT_EQ(hidden.find("What the other player knows"), std::string::npos);
  EXPECT_NE(revealed.find("What the other player knows"), std::string::npos);
  EXPECT_TRUE(hidden.ends_with("### Conversation\n\n(You send the first message.)\n"));

  PromptOptions human;
  human.include_response_format = false;
  EXPECT_EQ(assemble_prompt(in, Condition::kHidden, Variant::kDefault, {}, human).find("### Response format"),
            std::string::npos);
}

TEST(Prompt, history_is_rendered_with_speakers) {
  const Instance in = worked_example();
  const std::string p = assemble_prompt(in, Condition::kHidden, Variant::kDefault,
                                        {{Speaker::kPersuader, "Hi"}, {Speaker::kTarget, "Hello"}});
  EXPECT_TRUE(p.ends_with("**You:** Hi\n\n**Other player:** Hello\n\n"));
}

TEST(Prompt, variants_add_their_sections) {
  const Instance in = worked_example();
  const std::string hint = assemble_prompt(in, Condition::kHidden, Variant::kAddHint, {});
  EXPECT_NE(hint.find(std::string(kHintPrompt)), std::string::npos);

  const std::string discrete = assemble_prompt(in, Condition::kHidden, Variant::kDiscreteGame, {});
  EXPECT_NE(discrete.find("### Message Format"), std::string::npos);

  const std::string perfect = assemble_prompt(in, Condition::kHidden, Variant::kPerfectGame, {});
  EXPECT_NE(perfect.find("### Example game"), std::string::npos);
  EXPECT_NE(perfect.find("**You:** What is your preferred proposal?"), std::string::npos);

  EXPECT_THROW(assemble_prompt(in, Condition::kHidden, Variant::kNonMental, {}), Error);
  Instance metals = in;
  metals.scenario = find_scenario("metals");
  const std::string nm = assemble_prompt(metals, Condition::kHidden, Variant::kNonMental, {});
  EXPECT_TRUE(nm.starts_with(std::string(kNonMentalInstructionsPrompt)));
}

TEST(Prompt, demonstration_uses_different_payoffs) {
  const Instance in = worked_example();
  const Instance demo = detail::demo_instance(in.scenario, in.matrix);
  EXPECT_NE(demo.matrix, in.matrix);
  EXPECT_TRUE(check_conditions(demo));
  for (const auto& s : critical_sample()) {
    const Instance d = detail::demo_instance(s.scenario, s.matrix);
    EXPECT_NE(d.matrix, s.matrix);
    EXPECT_EQ(d.scenario.id, s.scenario.id);
  }
}

TEST(Prompt, model_persuader_sees_rejection_feedback) {
  const Instance in = worked_example();
  auto model = std::make_shared<QueueModel>(std::vector<std::string>{"thinking --- Hello there, friend."});
  ModelPersuader p(model, "fake");
  PersuaderContext ctx;
  ctx.view = render_persuader_view(in, Condition::kHidden);
  ctx.rejection_feedback = "proposal A does not increase public trust";
  const auto m = p.step(ctx);
  EXPECT_EQ(m.text, "Hello there, friend.");
  EXPECT_EQ(p.kind(), "fake");
  EXPECT_NE(model->prompts[0].find("rejected: proposal A does not increase public trust"), std::string::npos);
}

TEST(Variants, names_round_trip) {
  for (Variant v : {Variant::kDefault, Variant::kNonMental, Variant::kAddHint, Variant::kPerfectGame,
                    Variant::kDiscreteGame})
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  EXPECT_THROW(variant_from_string("louder"), Error);
  try {
    check_variant(find_scenario("llm"), Variant::kNonMental);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompatibleVariant);
  }
}
