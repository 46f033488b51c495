#pragma once

// Aggregate statistics over finished games, with percentile bootstrap
// intervals from resampling whole games.

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include "mindgames/game.hpp"

namespace mindgames {

struct Estimate {
  double value = 0;
  double ci_low = 0;
  double ci_high = 0;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

using Curve = std::array<Estimate, kNumTurns>;

struct MetricsReport {
  std::size_t games = 0;
  bool count_inferential = true;  // which variant `appeals_to_all` reports
  Estimate success_rate;
  Curve success_by_turn{};  // share of games whose goal was first reached by turn t
  Estimate appeals_to_all;
  Estimate appeals_to_all_with_inferential;
  Estimate appeals_to_all_without_inferential;
  Curve disclosures_per_turn{};      // cells new to the target
  Curve raw_disclosures_per_turn{};  // every classified disclosure
  Curve unique_motivational_per_turn{};
  Curve unique_informational_per_turn{};
  Curve sink_state_by_turn{};

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct MetricsOptions {
  int bootstrap_resamples = 10000;
  std::uint64_t seed = 0;
  bool count_inferential = true;
};

/// Per-game values every statistic is a mean of.
struct GameFeatures {
  bool success = false;
  std::array<bool, kNumTurns> succeeded_by{};
  bool appeals_to_all_with_inferential = false;
  bool appeals_to_all_without_inferential = false;
  std::array<int, kNumTurns> disclosures{};
  std::array<int, kNumTurns> raw_disclosures{};
  std::array<int, kNumTurns> unique_motivational{};
  std::array<int, kNumTurns> unique_informational{};
  std::array<bool, kNumTurns> sink{};

  friend bool operator==(const GameFeatures&, const GameFeatures&) = default;
};

inline GameFeatures game_features(const GameTranscript& t) {
  if (!t.outcome) throw Error(ErrorCode::kInvalidArgument, "game " + t.instance.id + " is unfinished");
  GameFeatures f;
  f.success = t.outcome->success;
  IndexSet motivational;
  CellSet informational;
  IndexSet inferential;
  CellSet known = initial_state(t.instance).known;
  for (std::size_t i = 0; i < t.turns.size() && i < static_cast<std::size_t>(kNumTurns); ++i) {
    const TurnRecord& turn = t.turns[i];
    const Appeals& a = turn.action.appeals;
    f.unique_motivational[i] = (a.motivational - motivational).size();
    f.unique_informational[i] = (a.informational - informational).size();
    motivational = motivational | a.motivational;
    informational = informational | a.informational;
    inferential = inferential | a.inferential;

    f.raw_disclosures[i] = static_cast<int>(turn.action.disclosures.size());
    f.disclosures[i] = (turn.action.disclosed_cells() - known).size();
    known = known | turn.action.disclosed_cells();

    f.succeeded_by[i] = t.first_success_turn && *t.first_success_turn <= turn.turn;
    f.sink[i] = turn.sink_state;
  }
  const bool all_motivational = motivational == IndexSet::all();
  const bool all_informational = informational == CellSet::all();
  const bool full_inferential = inferential == IndexSet::all();
  f.appeals_to_all_without_inferential = all_motivational && all_informational;
  f.appeals_to_all_with_inferential =
      (all_motivational || full_inferential) && (all_informational || full_inferential);
  return f;
}

namespace detail {

/// Flattens features so a resample is a single pass over games.
inline constexpr std::size_t kScalarStats = 3;
inline constexpr std::size_t kCurveStats = 6;
inline constexpr std::size_t kNumStats = kScalarStats + kCurveStats * kNumTurns;

inline std::array<double, kNumStats> flatten(const GameFeatures& f) {
  std::array<double, kNumStats> v{};
  v[0] = f.success;
  v[1] = f.appeals_to_all_with_inferential;
  v[2] = f.appeals_to_all_without_inferential;
  for (int t = 0; t < kNumTurns; ++t) {
    const std::size_t base = kScalarStats + static_cast<std::size_t>(t) * kCurveStats;
    v[base + 0] = f.succeeded_by[t];
    v[base + 1] = f.disclosures[t];
    v[base + 2] = f.raw_disclosures[t];
    v[base + 3] = f.unique_motivational[t];
    v[base + 4] = f.unique_informational[t];
    v[base + 5] = f.sink[t];
  }
  return v;
}

}  // namespace detail

inline MetricsReport compute_metrics(const std::vector<GameTranscript>& transcripts,
                                     const MetricsOptions& options = {}) {
  if (transcripts.empty()) throw Error(ErrorCode::kEmptyInput, "no transcripts");
  using Row = std::array<double, detail::kNumStats>;
  std::vector<Row> rows;
  rows.reserve(transcripts.size());
  for (const auto& t : transcripts) rows.push_back(detail::flatten(game_features(t)));
  const std::size_t n = rows.size();

  const auto mean_of = [&](const auto& pick) {
    Row sum{};
    for (std::size_t i = 0; i < n; ++i) {
      const Row& r = rows[pick(i)];
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += r[k];
    }
    for (auto& s : sum) s /= static_cast<double>(n);
    return sum;
  };
  const Row point = mean_of([](std::size_t i) { return i; });

  std::vector<std::vector<double>> samples(detail::kNumStats);
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  for (int b = 0; b < options.bootstrap_resamples; ++b) {
    for (auto& i : idx) i = pick(rng);
    const Row m = mean_of([&](std::size_t i) { return idx[i]; });
    for (std::size_t k = 0; k < m.size(); ++k) samples[k].push_back(m[k]);
  }
  const auto estimate = [&](std::size_t k) {
    Estimate e{point[k], point[k], point[k]};
    auto& s = samples[k];
    if (s.empty()) return e;
    std::sort(s.begin(), s.end());
    const auto at = [&](double q) {
      return s[static_cast<std::size_t>(q * static_cast<double>(s.size() - 1) + 0.5)];
    };
    e.ci_low = at(0.025);
    e.ci_high = at(0.975);
    return e;
  };

  MetricsReport r;
  r.games = n;
  r.count_inferential = options.count_inferential;
  r.success_rate = estimate(0);
  r.appeals_to_all_with_inferential = estimate(1);
  r.appeals_to_all_without_inferential = estimate(2);
  r.appeals_to_all = options.count_inferential ? r.appeals_to_all_with_inferential
                                               : r.appeals_to_all_without_inferential;
  for (int t = 0; t < kNumTurns; ++t) {
    const std::size_t base = detail::kScalarStats + static_cast<std::size_t>(t) * detail::kCurveStats;
    r.success_by_turn[t] = estimate(base + 0);
    r.disclosures_per_turn[t] = estimate(base + 1);
    r.raw_disclosures_per_turn[t] = estimate(base + 2);
    r.unique_motivational_per_turn[t] = estimate(base + 3);
    r.unique_informational_per_turn[t] = estimate(base + 4);
    r.sink_state_by_turn[t] = estimate(base + 5);
  }
  return r;
}

}  // namespace mindgames
