#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace mindgames;
using namespace testing_support;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kStorageError;  // sentinel: nothing thrown
}

ActionMessage random_action(std::mt19937_64& rng, const Instance& in, bool truthful) {
  ActionMessage a;
  for (int i = 0; i < 3; ++i) {
    if (rng() % 2) a.appeals.motivational.insert(i);
    if (rng() % 2) a.appeals.inferential.insert(i);
  }
  a.appeals.informational = CellSet(static_cast<std::uint16_t>(rng() % 512));
  const CellSet cells(static_cast<std::uint16_t>(rng() % 512));
  for (Cell c : cells.cells()) {
    const Effect e = truthful ? in.matrix.at(c) : *effect_from_int(static_cast<int>(rng() % 3) - 1);
    a.add_disclosure({c, e});
  }
  return a;
}

std::vector<ChatMessage> one(std::string text) { return {ChatMessage{Speaker::kPersuader, std::move(text)}}; }

}  // namespace

TEST(Discrete, round_trip_on_random_actions) {
  const Instance in = worked_example();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    const ActionMessage a = random_action(rng, in, false);
    const std::string text = serialize_discrete_action(a, in.scenario);
    EXPECT_EQ(canonicalize(parse_discrete_action(text, in.scenario)), canonicalize(a)) << text;
  }
}

TEST(Discrete, wire_format) {
  const Instance in = worked_example();
  ActionMessage a = disclose(in, {kAd});
  a.appeals.motivational = IndexSet{2};
  EXPECT_EQ(serialize_discrete_action(a, in.scenario),
            R"({"motivational":["public trust"],"informational":[],"inferential":[],)"
            R"("disclosures":[{"proposal":"A","attribute":"development speed","utility":-1}]})");
}

TEST(Discrete, lenient_forms) {
  const Scenario& s = worked_example().scenario;
  EXPECT_TRUE(parse_discrete_action("[]", s).empty());
  EXPECT_TRUE(parse_discrete_action("{}", s).empty());
  const auto a = parse_discrete_action("```json\n{\"inferential\": [\"a\", \"C\"]}\n```", s);
  EXPECT_EQ(a.appeals.inferential, (IndexSet{0, 2}));
}

TEST(Discrete, errors_carry_codes) {
  const Scenario& s = worked_example().scenario;
  EXPECT_EQ(code_of([&] { parse_discrete_action("not json", s); }), ErrorCode::kMalformedAction);
  EXPECT_EQ(code_of([&] { parse_discrete_action(R"({"bribes": []})", s); }), ErrorCode::kMalformedAction);
  EXPECT_EQ(code_of([&] { parse_discrete_action(R"({"motivational": "x"})", s); }),
            ErrorCode::kMalformedAction);
  EXPECT_EQ(code_of([&] { parse_discrete_action(R"({"inferential": ["D"]})", s); }), ErrorCode::kUnknownName);
  EXPECT_EQ(code_of([&] {
              parse_discrete_action(
                  R"({"disclosures": [{"proposal": "A", "attribute": "public trust", "utility": 2}]})", s);
            }),
            ErrorCode::kBadUtility);
  EXPECT_EQ(code_of([&] {
              parse_discrete_action(
                  R"({"disclosures": [{"proposal": "A", "attribute": "public trust", "utility": 0.5}]})", s);
            }),
            ErrorCode::kMalformedAction);
}

TEST(Discrete, target_reply_serialization) {
  const Instance in = worked_example();
  ActionMessage a = disclose(in, {kAd});
  a.appeals.motivational = IndexSet{1};
  a.appeals.inferential = IndexSet{0};
  const auto [_, reply] = respond(initial_state(in), in, a);
  EXPECT_EQ(serialize_target_reply(reply, ReplyMode::kDiscrete, in.scenario),
            R"({"motivational":[{"attribute":"development speed","utility":-1}],)"
            R"("informational":[{"proposal":"A","attribute":"development speed","utility":-1}],)"
            R"("inferential":[{"proposal":"A","utility":1,"chosen":false}]})");
  EXPECT_EQ(serialize_target_reply(reply, ReplyMode::kNaturalLanguage, in.scenario), reply.rendered_text);
}

TEST(TemplateClassifier, recovers_rendered_actions) {
  const Instance in = worked_example();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const ActionMessage a = random_action(rng, in, true);
    const std::string text = a.empty() ? std::string(kFillerMessage) : render_action_text(a, in.scenario);
    EXPECT_EQ(canonicalize(TemplateClassifier::classify_text(text, in.scenario)), canonicalize(a)) << text;
  }
}

TEST(TemplateClassifier, canonical_phrasings) {
  const Instance in = worked_example();
  ActionMessage a;
  a.appeals.informational = CellSet::all();
  a.appeals.motivational = IndexSet::all();
  a.appeals.inferential = IndexSet::all();
  EXPECT_EQ(render_action_text(a, in.scenario),
            "What do you know about the proposals? Which attributes do you like? What is your "
            "preferred proposal?");
  ActionMessage b;
  b.appeals.informational = CellSet{kAs, kAd, kAt, kCt};
  b.appeals.motivational = IndexSet{0};
  b.appeals.inferential = IndexSet{1};
  EXPECT_EQ(render_action_text(b, in.scenario),
            "What do you know about proposal A? What do you know about the effect of proposal C on "
            "public trust? How do you feel about safety and control? What is your utility for proposal B?");
}

TEST(TemplateClassifier, reads_view_style_disclosures_and_ignores_chatter) {
  const Instance in = worked_example();
  TemplateClassifier c;
  const auto a = c.classify(
      one("Hi there! Proposal **A** will *decrease development speed* and will *have no effect on "
          "public trust*. Also, nice weather."),
      in.scenario);
  EXPECT_EQ(canonicalize(a).disclosures,
            (std::vector<Disclosure>{{kAd, Effect::kDecrease}, {kAt, Effect::kNone}}));
  EXPECT_TRUE(a.appeals.empty());
  EXPECT_TRUE(c.classify(one("Let us talk."), in.scenario).empty());
}

TEST(TemplateClassifier, needs_a_persuader_message_last) {
  TemplateClassifier c;
  EXPECT_THROW(c.classify({}, worked_example().scenario), Error);
  EXPECT_THROW(c.classify({ChatMessage{Speaker::kTarget, "x"}}, worked_example().scenario), Error);
}

TEST(ModelClassifier, fills_both_prompts_and_parses_list_forms) {
  const Instance in = worked_example();
  auto model = std::make_shared<QueueModel>(std::vector<std::string>{
      "{'motivational': ['public trust'], 'informational': [{'proposal': 'B', 'attribute': "
      "'safety and control'},], 'inferential': ['A']}",
      "[{'proposal': 'C', 'attribute': 'development speed', 'utility': 2}]"});
  ModelClassifier c(model);
  const auto a = c.classify(one("Hello"), in.scenario);
  EXPECT_EQ(a.appeals.motivational, IndexSet{2});
  EXPECT_EQ(a.appeals.informational, CellSet{kBs});
  EXPECT_EQ(a.appeals.inferential, IndexSet{0});
  ASSERT_EQ(a.disclosures.size(), 1u);
  EXPECT_EQ(a.disclosures[0], (Disclosure{kCd, Effect::kIncrease}));
  ASSERT_EQ(model->prompts.size(), 2u);
  EXPECT_NE(model->prompts[0].find("A, B, C"), std::string::npos);
  EXPECT_NE(model->prompts[0].find("\"Hello\""), std::string::npos);
  EXPECT_NE(model->prompts[1].find("Proposals: A, B, C; Attributes: safety and control"), std::string::npos);
  EXPECT_EQ(model->prompts[0].find("{messages}"), std::string::npos);
}

TEST(ModelClassifier, dict_forms_and_utility_signs) {
  const Instance in = worked_example();
  auto model = std::make_shared<QueueModel>(std::vector<std::string>{
      R"({"informational": {"A": ["public trust", "development speed"]}})",
      R"({"B": {"public trust": -0.5, "development speed": 0}})"});
  ModelClassifier c(model);
  const auto a = canonicalize(c.classify(one("x"), in.scenario));
  EXPECT_EQ(a.appeals.informational, (CellSet{kAt, kAd}));
  EXPECT_EQ(a.disclosures, (std::vector<Disclosure>{{kBd, Effect::kNone}, {kBt, Effect::kDecrease}}));
}

TEST(ModelClassifier, failures) {
  const Instance in = worked_example();
  {
    ModelClassifier c(std::make_shared<QueueModel>(std::vector<std::string>{"no json here", "[]"}));
    EXPECT_EQ(code_of([&] { c.classify(one("x"), in.scenario); }), ErrorCode::kClassifierParseError);
  }
  {
    ModelClassifier c(std::make_shared<QueueModel>(std::vector<std::string>{}));
    EXPECT_EQ(code_of([&] { c.classify(one("x"), in.scenario); }), ErrorCode::kClassifierUnavailable);
  }
  {
    ModelClassifier c(std::make_shared<QueueModel>(std::vector<std::string>{R"({"inferential": ["Z"]})", "[]"}));
    EXPECT_EQ(code_of([&] { c.classify(one("x"), in.scenario); }), ErrorCode::kClassifierParseError);
  }
}

TEST(Validation, false_disclosure_names_the_cell) {
  const Instance in = worked_example();
  ActionMessage a = disclose(in, {kAd});
  a.add_disclosure({kCt, Effect::kDecrease});
  const auto r = validate_persuader_message(a, in);
  EXPECT_FALSE(r);
  EXPECT_EQ(r.reason, ErrorCode::kFalseDisclosure);
  EXPECT_EQ(r.cell, std::optional<Cell>(kCt));
  EXPECT_EQ(r.detail, "proposal C does not decrease public trust");
  EXPECT_TRUE(validate_persuader_message(disclose(in, {kAd, kCt}), in));
}

TEST(Validation, minimum_length_only_for_humans) {
  const Instance in = worked_example();
  ValidationOptions human;
  human.human_checks = true;
  EXPECT_EQ(validate_persuader_message({}, in, "  Okay.   ", human).reason, ErrorCode::kTooShort);
  EXPECT_TRUE(validate_persuader_message({}, in, "Okay.", {}));
  EXPECT_TRUE(validate_persuader_message({}, in, "ten chars!", human));
}

TEST(Text, truncation_counts_code_points) {
  const std::string s(400, 'x');
  EXPECT_EQ(truncate_chars(s).size(), 300u);
  std::string accents;
  for (int i = 0; i < 310; ++i) accents += "\xC3\xA9";
  const std::string t = truncate_chars(accents);
  EXPECT_EQ(count_chars(t), 300u);
  EXPECT_EQ(t.size(), 600u);
  EXPECT_EQ(truncate_chars("short"), "short");
}

TEST(Prompts, fill_template_substitutes_and_unescapes) {
  EXPECT_EQ(fill_template("{{a}} {b}", {{"b", "x"}}), "{a} x");
  EXPECT_EQ(code_of([] { fill_template("{missing}"); }), ErrorCode::kInvalidArgument);
  const std::string discrete = fill_template(kDiscreteGamePrompt);
  EXPECT_NE(discrete.find(R"({"motivational" : ["x"]})"), std::string::npos);
}

TEST(Prompts, templates_are_complete) {
  EXPECT_TRUE(kInstructionsPrompt.starts_with("## High Level Instructions"));
  EXPECT_TRUE(kResponseFormatSection.starts_with("### Response format"));
  EXPECT_TRUE(kHintPrompt.starts_with("### Hint"));
  EXPECT_TRUE(kHintPrompt.ends_with("Assume that you will receive truthful responses."));
  EXPECT_NE(kAppealsPrompt.find("{messages}"), std::string_view::npos);
  EXPECT_NE(kDisclosuresPrompt.find("{game_info}"), std::string_view::npos);
}
