// mindgames: generate instances, play, run tournaments, analyze transcripts,
// estimate the random baseline and serve the session API.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mindgames/http_service.hpp"
#include "mindgames/mindgames.hpp"
#include "mindgames/model_client.hpp"

using namespace mindgames;

namespace {

std::shared_ptr<ModelClient> model_from_env() {
  return std::make_shared<HttpModelClient>(ModelEndpoint::from_env());
}

// Default pool: the 100 critical instances from seed 0.
std::vector<Instance> load_pool(const std::string& path) {
  if (path.empty()) return sample_critical(GeneratorParams{});
  return load_instances(path);
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

GeneratorParams parse_filters(const std::string& list) {
  GeneratorParams p;
  if (list == "all") return p;
  p.require_hidden_exact_4 = p.require_reveal_exact_2 = false;
  p.filter_trivial_strategies = p.require_exact_reveal_structure = false;
  if (list == "none") return p;
  std::stringstream ss(list);
  for (std::string name; std::getline(ss, name, ',');) {
    if (name == "hidden4") p.require_hidden_exact_4 = true;
    else if (name == "reveal2") p.require_reveal_exact_2 = true;
    else if (name == "nontrivial") p.filter_trivial_strategies = true;
    else if (name == "exact") p.require_exact_reveal_structure = true;
    else throw Error(ErrorCode::kInvalidArgument, "unknown filter '" + name + "'");
  }
  return p;
}

std::unique_ptr<Persuader> make_persuader(const std::string& kind, int baseline_n, std::uint64_t seed) {
  if (kind == "random") return std::make_unique<RandomBaselinePersuader>(baseline_n, seed);
  if (kind == "scripted_perfect") return std::make_unique<ScriptedPerfectPersuader>();
  if (kind == "bruteforce") return std::make_unique<BruteForcePersuader>();
  if (kind == "model") return std::make_unique<ModelPersuader>(model_from_env());
  throw Error(ErrorCode::kBadConfig, "unknown persuader '" + kind + "'");
}

std::shared_ptr<Classifier> make_classifier(const std::string& kind) {
  if (kind == "template") return std::make_shared<TemplateClassifier>();
  if (kind == "model") return std::make_shared<ModelClassifier>(model_from_env());
  throw Error(ErrorCode::kBadConfig, "unknown classifier '" + kind + "'");
}

const Instance& find_instance(const std::vector<Instance>& pool, const std::string& id) {
  if (id.empty()) return pool.front();
  for (const auto& in : pool)
    if (in.id == id) return in;
  throw Error(ErrorCode::kInvalidArgument, "no instance '" + id + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persuasion games against a rational target"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Enumerate or sample instances");
  int attributes = 3;
  std::size_t sample = 0;
  std::uint64_t gen_seed = 0;
  std::string filters = "all", gen_out;
  gen->add_option("--attributes", attributes, "Attributes per proposal (2 prints counts only)")
      ->check(CLI::IsMember({2, 3}));
  gen->add_option("--sample", sample, "Sample this many critical instances instead of enumerating");
  gen->add_option("--seed", gen_seed, "Sampling seed");
  gen->add_option("--filters", filters,
                  "all, none, or a comma list of hidden4,reveal2,nontrivial,exact");
  gen->add_option("-o,--out", gen_out, "Output file (default stdout)");

  // play
  auto* play = app.add_subcommand("play", "Play one game in the terminal");
  std::string play_instances, play_id, play_condition = "Hidden";
  play->add_option("--instances", play_instances, "Instance file (default: built-in sample)");
  play->add_option("--instance", play_id, "Instance id (default: first)");
  play->add_option("--condition", play_condition)->check(CLI::IsMember({"Hidden", "Revealed"}));

  // tournament
  auto* tour = app.add_subcommand("tournament", "Run built-in or model persuaders over instances");
  std::string persuader = "scripted_perfect", t_condition = "Hidden", t_variant = "default",
              t_instances, classifier = "template", t_out;
  int t_trials = 1, t_n = 6;
  std::uint64_t t_seed = 0;
  tour->add_option("--persuader", persuader)
      ->check(CLI::IsMember({"random", "scripted_perfect", "bruteforce", "model"}));
  tour->add_option("--condition", t_condition)->check(CLI::IsMember({"Hidden", "Revealed"}));
  tour->add_option("--variant", t_variant)
      ->check(CLI::IsMember({"default", "non_mental", "add_hint", "perfect_game", "discrete_game"}));
  tour->add_option("--instances", t_instances, "Instance file (default: built-in sample)");
  tour->add_option("--trials", t_trials, "Games per instance")->check(CLI::PositiveNumber);
  tour->add_option("--classifier", classifier)->check(CLI::IsMember({"template", "model"}));
  tour->add_option("--n", t_n, "Draws for the random persuader");
  tour->add_option("--seed", t_seed);
  tour->add_option("-o,--out", t_out, "Append transcripts to this file");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Aggregate metrics over transcripts");
  std::string a_input;
  bool no_inferential = false;
  int bootstrap = 10000;
  std::uint64_t a_seed = 0;
  analyze->add_option("--input", a_input, "Transcript file")->required();
  analyze->add_flag("--no-inferential", no_inferential, "Do not let ranking questions count as the others");
  analyze->add_option("--bootstrap", bootstrap, "Bootstrap resamples");
  analyze->add_option("--seed", a_seed);

  // baseline
  auto* base = app.add_subcommand("baseline", "Random-disclosure baseline");
  int b_n = 6;
  std::uint64_t b_trials = 50000, b_seed = 0;
  bool analytic = false;
  std::string b_instances, schedule = "single_turn";
  base->add_option("--n", b_n, "Random disclosures per game");
  base->add_option("--trials", b_trials, "Monte Carlo games");
  base->add_flag("--analytic", analytic, "Closed form only");
  base->add_option("--instances", b_instances);
  base->add_option("--schedule", schedule)->check(CLI::IsMember({"single_turn", "round_robin"}));
  base->add_option("--seed", b_seed);

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP session service");
  int port = 8080;
  std::string host = "127.0.0.1", storage_dir, s_instances;
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--storage-dir", storage_dir, "Where finished transcripts are appended");
  serve->add_option("--instances", s_instances);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (attributes == 2) {
        const auto c = count_configurations(2, -1);
        print_json({{"relabeled_hidden_sets", c.relabeled_hidden_sets},
                    {"labeled_hidden_sets", c.labeled_hidden_sets},
                    {"labeled_tuples", c.labeled_tuples},
                    {"relabeled_tuples", c.relabeled_tuples}});
        return 0;
      }
      GeneratorParams p = parse_filters(filters);
      p.seed = gen_seed;
      std::ofstream file;
      if (!gen_out.empty()) file.open(gen_out);
      std::ostream& out = gen_out.empty() ? std::cout : file;
      if (sample > 0) {
        p.sample_count = sample;
        write_instances(out, sample_critical(p));
      } else {
        out << header_record(kInstancesSchema).dump() << "\n";
        const auto n = enumerate_instances(p, [&](const Instance& in) { out << to_json(in).dump() << "\n"; });
        std::cerr << n << " instances\n";
      }
      return 0;
    }

    if (*play) {
      const auto pool = load_pool(play_instances);
      GameOptions o;
      o.condition = condition_from_string(play_condition);
      o.validation.human_checks = true;
      Referee ref(find_instance(pool, play_id), o, std::make_shared<TemplateClassifier>());
      std::cout << render_view_text(ref.view()) << "\n";
      std::string line;
      while (!ref.finished()) {
        std::cout << "[turn " << ref.next_turn() << "/" << kNumTurns << "] > " << std::flush;
        if (!std::getline(std::cin, line)) break;
        PersuaderMessage m;
        m.text = line;
        const auto r = ref.submit(m);
        if (!r.accepted) {
          std::cout << "Rejected: " << r.rejection->detail << "\n";
          continue;
        }
        std::cout << ref.transcript().turns.back().reply_text << "\n";
      }
      if (const auto& out = ref.transcript().outcome) {
        std::cout << (out->success ? "You won" : "You lost") << ": the other player chose "
                  << ref.instance().scenario.proposal_names[static_cast<std::size_t>(out->final_choice)] << ".\n";
      }
      return 0;
    }

    if (*tour) {
      const auto pool = load_pool(t_instances);
      GameOptions o;
      o.condition = condition_from_string(t_condition);
      o.variant = variant_from_string(t_variant);
      const auto cls = make_classifier(classifier);
      std::optional<TranscriptLog> log;
      if (!t_out.empty()) log.emplace(t_out);
      std::vector<GameTranscript> games;
      std::uint64_t seed = t_seed;
      for (const auto& in : pool) {
        for (int k = 0; k < t_trials; ++k) {
          auto p = make_persuader(persuader, t_n, seed++);
          games.push_back(run_game(in, *p, o, cls));
          if (log) log->append(games.back());
        }
      }
      MetricsOptions mo;
      mo.bootstrap_resamples = 1000;
      print_json(to_json(compute_metrics(games, mo)));
      return 0;
    }

    if (*analyze) {
      MetricsOptions mo;
      mo.bootstrap_resamples = bootstrap;
      mo.seed = a_seed;
      mo.count_inferential = !no_inferential;
      print_json(to_json(compute_metrics(load_transcripts(a_input), mo)));
      return 0;
    }

    if (*base) {
      Json out = {{"n", b_n}, {"analytic", analytic_win_probability(b_n)}};
      if (!analytic) {
        BaselineOptions bo;
        bo.n = b_n;
        bo.trials = b_trials;
        bo.seed = b_seed;
        bo.schedule = schedule == "round_robin" ? BaselineSchedule::kRoundRobin : BaselineSchedule::kSingleTurn;
        out["monte_carlo"] = to_json(monte_carlo_baseline(load_pool(b_instances), bo));
      }
      print_json(out);
      return 0;
    }

    if (*serve) {
      SessionDeps deps;
      deps.instances = load_pool(s_instances);
      if (!storage_dir.empty()) deps.storage_dir = storage_dir;
      deps.model_factory = model_from_env;
      SessionManager manager(std::move(deps));
      httplib::Server server;
      install_routes(server, manager);
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "could not bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
