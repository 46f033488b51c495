// Walks through the worked example: what the persuader sees, how the target's
// choice moves as cells are disclosed, and a full game by the scripted agent.

#include <iostream>

#include "mindgames/mindgames.hpp"

using namespace mindgames;

namespace {

void show(const Instance& in, const KnowledgeState& s, const char* label) {
  const auto u = evaluate_utilities(in.matrix, in.values, s.known);
  std::cout << label << ": utilities (" << u[0] << ", " << u[1] << ", " << u[2] << "), choice "
            << in.scenario.proposal_names[static_cast<std::size_t>(s.current_choice())] << "\n";
}

}  // namespace

int main() {
  const Instance in = canonical_example_instance();
  std::cout << render_view_text(render_persuader_view(in, Condition::kRevealed)) << "\n";

  KnowledgeState s = initial_state(in);
  show(in, s, "start");
  s = simulate_disclosure(s, in.matrix, in.values, in.reveal);
  show(in, s, "after the reveal set");
  s = simulate_disclosure(s, in.matrix, in.values, in.hidden);
  show(in, s, "after everything");

  std::cout << "\nWinning sets:";
  for (const CellSet& w : winning_sets(in)) std::cout << " " << w.size() << "-cell";
  std::cout << "\n\n";

  ScriptedPerfectPersuader agent;
  const GameTranscript t = run_game(in, agent);
  for (const auto& turn : t.turns) {
    std::cout << "Turn " << turn.turn << "\n  persuader: " << turn.persuader_text
              << "\n  target:    " << turn.reply_text << "\n";
  }
  std::cout << (t.outcome->success ? "\nThe target chose the goal.\n" : "\nThe goal was missed.\n");
}
