#pragma once

// Built-in cover stories and the canonical worked-example instance.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mindgames/core.hpp"

namespace mindgames {

inline const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> scenarios = {
      {"llm",
       "Large language models (LLMs) could transform education, scientific discovery, and more. "
       "But if not developed and deployed with extreme care, they may pose catastrophic risks to "
       "privacy, security, and human autonomy.",
       {"A", "B", "C"},
       {"safety and control", "development speed", "public trust"},
       Flavor::kMental},
      {"moon",
       "The stakes on the Moon have grown significantly in recent years. Lunar resources and "
       "technologies could determine the balance of power on Earth. But unrestrained development "
       "risks turning the Moon into a conflict zone and ecological disaster. We must now decide on "
       "a development policy that will shape the future of lunar settlements.",
       {"A", "B", "C"},
       {"scientific advancement", "commercial opportunities",
        "preservation of the lunar environment"},
       Flavor::kMental},
      {"ocean",
       "Recent technological advancements have made ocean energy more viable, attracting attention "
       "from environmental groups, energy companies, and coastal communities. We must now choose a "
       "development policy that will shape the future of the country's energy landscape. Their "
       "decision will have significant impacts.",
       {"A", "B", "C"},
       {"energy production", "marine ecosystems", "coastal economies"},
       Flavor::kMental},
      {"education",
       "Rapid technological advancements and changing workforce needs have sparked a nationwide "
       "debate on the effectiveness of the current education system. Student test results are "
       "slipping, teachers are leaving the profession, and employers warn of a skills mismatch "
       "between graduates and workforce needs.",
       {"A", "B", "C"},
       {"student achievement", "teacher satisfaction", "economic competitiveness"},
       Flavor::kMental},
      {"lunch",
       "A school is deciding whether to refrain from serving meat in the lunchroom. This decision "
       "will also save the school a lot of money.",
       {"A", "B", "C"},
       {"cost to school", "student choice", "animal suffering"},
       Flavor::kMental},
      {"metals",
       "You are a scientist running experiments that both produce and use different rare metals. "
       "You want to keep the levels of these metals sufficiently high or low in order to run future "
       "experiments. Here each experiment is a different *choice* and the metals it uses or "
       "produces are the *attributes*. Unfortunately, to run an experiment, you must first get "
       "approval from your employer's automated screening system.",
       {"A", "B", "C"},
       {"cesium", "molybdenum", "selenium"},
       Flavor::kNonMental},
  };
  return scenarios;
}

inline const Scenario& find_scenario(std::string_view id) {
  for (const auto& s : builtin_scenarios())
    if (s.id == id) return s;
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario '" + std::string(id) + "'");
}

inline std::vector<std::string> mental_scenario_ids() {
  std::vector<std::string> ids;
  for (const auto& s : builtin_scenarios())
    if (s.flavor == Flavor::kMental) ids.push_back(s.id);
  return ids;
}

/// The worked example: the target dislikes development speed and likes public
/// trust; it starts on C, switches to A once A.d and C.d are disclosed, and
/// ends on B when every hidden cell is disclosed.
inline Instance canonical_example_instance() {
  constexpr Effect kDown = Effect::kDecrease;
  constexpr Effect kZero = Effect::kNone;
  constexpr Effect kUp = Effect::kIncrease;
  Instance in;
  in.id = "canonical-example";
  in.scenario = find_scenario("llm");
  in.matrix.cells = {kZero, kDown, kZero,   // A
                     kZero, kDown, kUp,     // B
                     kZero, kUp, kUp};      // C
  in.values.weights = {Preference::kIndifferent, Preference::kDislike, Preference::kLike};
  in.hidden = CellSet{{0, 1}, {1, 1}, {1, 2}, {2, 1}};
  in.reveal = CellSet{{0, 1}, {2, 1}};
  in.goal = 0;
  in.initial_choice = 2;
  in.full_info_choice = 1;
  return in;
}

}  // namespace mindgames
