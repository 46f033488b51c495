#pragma once

#include <random>
#include <vector>

#include "mindgames/mindgames.hpp"
#include "oracles.hpp"

namespace testing_support {

using namespace mindgames;

inline unsigned oracle_mask(CellSet s) {
  unsigned m = 0;
  for (Cell c : s.cells()) m |= 1U << (c.proposal * 3 + c.attribute);
  return m;
}

inline oracle::Game<3> oracle_game(const Instance& in) {
  oracle::Game<3> g;
  for (int a = 0; a < 3; ++a) g.weights[a] = to_int(in.values.at(a));
  for (int p = 0; p < 3; ++p)
    for (int a = 0; a < 3; ++a) g.effects[p * 3 + a] = to_int(in.matrix.at({p, a}));
  return g;
}

inline CellSet from_oracle_mask(unsigned m) {
  CellSet s;
  for (int p = 0; p < 3; ++p)
    for (int a = 0; a < 3; ++a)
      if (m & (1U << (p * 3 + a))) s.insert({p, a});
  return s;
}

inline Instance worked_example() { return canonical_example_instance(); }

// Fig-1 cells by name: proposal letter plus attribute initial
// (s = safety and control, d = development speed, t = public trust).
inline constexpr Cell kAs{0, 0}, kAd{0, 1}, kAt{0, 2};
inline constexpr Cell kBs{1, 0}, kBd{1, 1}, kBt{1, 2};
inline constexpr Cell kCs{2, 0}, kCd{2, 1}, kCt{2, 2};

/// 100 critical instances, sampled once per process.
inline const std::vector<Instance>& critical_sample() {
  static const std::vector<Instance> cached = [] {
    GeneratorParams p;
    p.sample_count = 100;
    p.seed = 2024;
    return sample_critical(p);
  }();
  return cached;
}

/// Plays a fixed list of actions, then stays silent.
class ScriptPersuader final : public Persuader {
 public:
  explicit ScriptPersuader(std::vector<ActionMessage> script) : script_(std::move(script)) {}
  std::string kind() const override { return "script"; }
  PersuaderMessage step(const PersuaderContext& ctx) override {
    PersuaderMessage m;
    const auto i = static_cast<std::size_t>(ctx.turn - 1);
    m.structured = i < script_.size() ? script_[i] : ActionMessage{};
    m.text = m.structured->empty() ? std::string(kFillerMessage)
                                   : render_action_text(*m.structured, ctx.view.scenario);
    if (ctx.channel == Channel::kDiscrete) m.text = serialize_discrete_action(*m.structured, ctx.view.scenario);
    return m;
  }

 private:
  std::vector<ActionMessage> script_;
};

/// Sends fixed texts, then "Okay.".
class TextPersuader final : public Persuader {
 public:
  explicit TextPersuader(std::vector<std::string> texts) : texts_(std::move(texts)) {}
  std::string kind() const override { return "text"; }
  PersuaderMessage step(const PersuaderContext& ctx) override {
    PersuaderMessage m;
    const auto i = static_cast<std::size_t>(ctx.turn - 1);
    m.text = i < texts_.size() ? texts_[i] : std::string(kFillerMessage);
    return m;
  }

 private:
  std::vector<std::string> texts_;
};

inline ActionMessage disclose(const Instance& in, std::initializer_list<Cell> cells) {
  ActionMessage a;
  for (Cell c : cells) a.add_disclosure({c, in.matrix.at(c)});
  return a;
}

/// Fake chat model returning queued completions in order.
class QueueModel final : public ModelClient {
 public:
  explicit QueueModel(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string& prompt) override {
    prompts.push_back(prompt);
    if (next_ >= replies_.size()) throw std::runtime_error("no more replies");
    return replies_[next_++];
  }
  std::vector<std::string> prompts;

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

/// A random game with three attributes.
inline Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> trit(-1, 1);
  std::uniform_int_distribution<int> bits(0, 511);
  Instance in;
  in.id = "random";
  in.scenario = find_scenario("llm");
  for (auto& w : in.values.weights) w = *preference_from_int(trit(rng));
  for (auto& e : in.matrix.cells) e = *effect_from_int(trit(rng));
  in.hidden = CellSet(static_cast<std::uint16_t>(bits(rng)));
  const auto u = evaluate_utilities(in.matrix, in.values, in.hidden.complement());
  in.initial_choice = argmax_set(u).items().front();
  in.goal = (in.initial_choice + 1) % 3;
  return in;
}

}  // namespace testing_support
