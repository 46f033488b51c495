#pragma once

// Constraint-valid instance generation.
//
// A configuration is (values, matrix, hidden, reveal). It is valid when
//   1. the full-information utilities have a strict maximum y,
//   2. the start-state utilities (hidden cells unknown) have a strict maximum z,
//   3. the utilities after revealing `reveal` have a strict maximum x,
//   x, y, z are pairwise distinct, |hidden| <= 4 and reveal is a subset of hidden.
//
// Enumeration walks (values, matrix) in lexicographic trit order, prunes on
// condition 1 before touching hidden sets and on condition 2 before touching
// reveal sets.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mindgames/core.hpp"
#include "mindgames/scenarios.hpp"
#include "mindgames/target.hpp"

namespace mindgames {

inline constexpr int kMaxHidden = 4;

template <int A>
struct Configuration {
  BasicValueFunction<A> values;
  BasicUtilityMatrix<A> matrix;
  BasicCellSet<A> hidden;
  BasicCellSet<A> reveal;
  int goal = 0;
  int initial_choice = 0;
  int full_info_choice = 0;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Goal, initial and full-information choices when the conditions hold.
struct DerivedChoices {
  int goal;
  int initial_choice;
  int full_info_choice;
};

template <int A>
std::optional<DerivedChoices> derive_choices(const BasicValueFunction<A>& values,
                                             const BasicUtilityMatrix<A>& matrix,
                                             BasicCellSet<A> hidden, BasicCellSet<A> reveal,
                                             int hidden_cap = kMaxHidden) {
  if (hidden.size() > hidden_cap || !reveal.is_subset_of(hidden)) return std::nullopt;
  const auto y = strict_argmax(evaluate_utilities(matrix, values, BasicCellSet<A>::all()));
  const auto z = strict_argmax(evaluate_utilities(matrix, values, hidden.complement()));
  const auto x = strict_argmax(evaluate_utilities(matrix, values, hidden.complement() | reveal));
  if (!x || !y || !z) return std::nullopt;
  if (*x == *y || *x == *z || *y == *z) return std::nullopt;
  return DerivedChoices{*x, *z, *y};
}

template <int A>
bool check_conditions(const BasicValueFunction<A>& values, const BasicUtilityMatrix<A>& matrix,
                      BasicCellSet<A> hidden, BasicCellSet<A> reveal) {
  return derive_choices(values, matrix, hidden, reveal).has_value();
}

inline bool check_conditions(const Instance& in) {
  const auto d = derive_choices(in.values, in.matrix, in.hidden, in.reveal);
  return d && d->goal == in.goal && d->initial_choice == in.initial_choice &&
         d->full_info_choice == in.full_info_choice;
}

/// Subsets of the hidden set whose single-turn disclosure from the start
/// state leaves the target on the goal. Sorted by size, then lexicographically.
inline std::vector<CellSet> winning_sets(const Instance& instance) {
  const KnowledgeState start = initial_state(instance);
  std::vector<CellSet> out;
  const std::uint16_t h = instance.hidden.bits();
  for (std::uint16_t s = h;; s = static_cast<std::uint16_t>((s - 1) & h)) {
    const CellSet subset(s);
    const auto after = simulate_disclosure(start, instance.matrix, instance.values, subset);
    if (after.current_choice() == instance.goal) out.push_back(subset);
    if (s == 0) break;
  }
  std::sort(out.begin(), out.end(), [](CellSet a, CellSet b) { return size_lex_less(a, b); });
  return out;
}

/// True when some winning subset touches only cells of the goal proposal.
inline bool has_goal_only_winning_set(const Instance& instance,
                                      const std::vector<CellSet>& winning) {
  return std::any_of(winning.begin(), winning.end(), [&](CellSet s) {
    const auto cells = s.cells();
    return std::all_of(cells.begin(), cells.end(),
                       [&](Cell c) { return c.proposal == instance.goal; });
  });
}

namespace detail {

/// Utilities of all three proposals for any known-mask, via per-row lookup.
template <int A>
class UtilityTable {
 public:
  UtilityTable(const BasicValueFunction<A>& values, const BasicUtilityMatrix<A>& matrix) {
    for (int p = 0; p < kNumProposals; ++p) {
      for (int mask = 0; mask < (1 << A); ++mask) {
        int sum = 0;
        for (int a = 0; a < A; ++a)
          if ((mask >> a) & 1) sum += to_int(values.at(a)) * to_int(matrix.at(Cell{p, a}));
        rows_[p][mask] = sum;
      }
    }
  }

  Utilities operator()(std::uint16_t known) const {
    Utilities u{};
    for (int p = 0; p < kNumProposals; ++p) u[p] = rows_[p][(known >> (p * A)) & ((1 << A) - 1)];
    return u;
  }

 private:
  std::array<std::array<int, 1 << A>, kNumProposals> rows_{};
};

inline int strict_argmax_fast(const Utilities& u) {
  if (u[0] > u[1] && u[0] > u[2]) return 0;
  if (u[1] > u[0] && u[1] > u[2]) return 1;
  if (u[2] > u[0] && u[2] > u[1]) return 2;
  return -1;
}

/// All hidden-set masks with at most `cap` cells, by size then mask value.
template <int A>
std::vector<std::uint16_t> hidden_masks(int cap) {
  constexpr int kCells = kNumProposals * A;
  std::vector<std::uint16_t> masks;
  for (std::uint32_t m = 0; m < (1U << kCells); ++m)
    if (std::popcount(m) <= cap) masks.push_back(static_cast<std::uint16_t>(m));
  std::stable_sort(masks.begin(), masks.end(),
                   [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
  return masks;
}

template <int N>
bool next_trits(std::array<std::int8_t, N>& t) {
  for (int i = N - 1; i >= 0; --i) {
    if (t[i] < 1) {
      ++t[i];
      return true;
    }
    t[i] = -1;
  }
  return false;
}

}  // namespace detail

/// Visits every valid configuration in deterministic order. The visitor gets
/// (values, matrix, hidden, reveal, goal, initial, full_info) packed as a
/// Configuration. Returns the number visited.
template <int A, class Visitor>
std::uint64_t for_each_configuration(int hidden_cap, Visitor&& visit) {
  constexpr int kCells = kNumProposals * A;
  const auto masks = detail::hidden_masks<A>(hidden_cap);
  const std::uint16_t all = static_cast<std::uint16_t>((1U << kCells) - 1U);
  std::uint64_t count = 0;

  std::array<std::int8_t, A> vt;
  vt.fill(-1);
  do {
    if (std::all_of(vt.begin(), vt.end(), [](auto v) { return v == 0; })) continue;
    Configuration<A> cfg;
    for (int a = 0; a < A; ++a) cfg.values.weights[a] = static_cast<Preference>(vt[a]);
    std::array<std::int8_t, kCells> mt;
    mt.fill(-1);
    do {
      for (int i = 0; i < kCells; ++i) cfg.matrix.cells[i] = static_cast<Effect>(mt[i]);
      const detail::UtilityTable<A> table(cfg.values, cfg.matrix);
      const int y = detail::strict_argmax_fast(table(all));
      if (y < 0) continue;
      for (std::uint16_t h : masks) {
        const std::uint16_t start = static_cast<std::uint16_t>(all & ~h);
        const int z = detail::strict_argmax_fast(table(start));
        if (z < 0 || z == y) continue;
        // Ascending sub-masks of h.
        std::uint16_t r = 0;
        while (true) {
          const int x = detail::strict_argmax_fast(table(static_cast<std::uint16_t>(start | r)));
          if (x >= 0 && x != y && x != z) {
            cfg.hidden = BasicCellSet<A>(h);
            cfg.reveal = BasicCellSet<A>(r);
            cfg.goal = x;
            cfg.initial_choice = z;
            cfg.full_info_choice = y;
            ++count;
            visit(std::as_const(cfg));
          }
          if (r == h) break;
          r = static_cast<std::uint16_t>((r - h) & h);
        }
      }
    } while (detail::next_trits<kCells>(mt));
  } while (detail::next_trits<A>(vt));
  return count;
}

struct GeneratorParams {
  int num_attributes = 3;
  bool require_hidden_exact_4 = true;
  bool require_reveal_exact_2 = true;
  /// Drops instances that can be won by disclosing only goal-proposal cells.
  bool filter_trivial_strategies = true;
  /// Keeps only instances whose sole winning subset is the reveal set, i.e.
  /// both reveal cells are necessary and every other hidden cell is poison.
  bool require_exact_reveal_structure = true;
  std::uint64_t seed = 0;
  std::size_t sample_count = 100;
  std::vector<std::string> scenario_ids = mental_scenario_ids();
};

/// Stable textual code of a configuration, e.g. "v0-+.m0-00-+0++.h01a.r012".
inline std::string configuration_code(const ValueFunction& values, const UtilityMatrix& matrix,
                                      CellSet hidden, CellSet reveal) {
  auto trit = [](int v) { return v < 0 ? '-' : (v > 0 ? '+' : '0'); };
  std::string s = "v";
  for (auto w : values.weights) s += trit(to_int(w));
  s += ".m";
  for (auto e : matrix.cells) s += trit(to_int(e));
  char buf[32];
  std::snprintf(buf, sizeof buf, ".h%03x.r%03x", hidden.bits(), reveal.bits());
  return s + buf;
}

inline Instance make_instance(const Configuration<kNumAttributes>& cfg, const Scenario& scenario) {
  Instance in;
  in.scenario = scenario;
  in.matrix = cfg.matrix;
  in.values = cfg.values;
  in.hidden = cfg.hidden;
  in.reveal = cfg.reveal;
  in.goal = cfg.goal;
  in.initial_choice = cfg.initial_choice;
  in.full_info_choice = cfg.full_info_choice;
  in.id = scenario.id + ":" + configuration_code(cfg.values, cfg.matrix, cfg.hidden, cfg.reveal);
  return in;
}

/// Streams every valid three-attribute instance (under the first scenario).
inline std::uint64_t enumerate_instances(const GeneratorParams& params,
                                         const std::function<void(const Instance&)>& sink) {
  if (params.num_attributes != kNumAttributes) {
    throw Error(ErrorCode::kInvalidArgument,
                "instances are three-attribute; use count_configurations for other sizes");
  }
  const Scenario& scenario =
      find_scenario(params.scenario_ids.empty() ? "llm" : params.scenario_ids.front());
  return for_each_configuration<kNumAttributes>(
      kMaxHidden, [&](const Configuration<kNumAttributes>& cfg) { sink(make_instance(cfg, scenario)); });
}

/// The critical-trial filters applied to one candidate.
inline bool passes_critical_filters(const Instance& in, const GeneratorParams& params) {
  if (params.require_hidden_exact_4 && in.hidden.size() != 4) return false;
  if (params.require_reveal_exact_2 && in.reveal.size() != 2) return false;
  const auto winning = winning_sets(in);
  if (winning.empty()) return false;
  if (params.filter_trivial_strategies && has_goal_only_winning_set(in, winning)) return false;
  if (params.require_exact_reveal_structure && !(winning.size() == 1 && winning[0] == in.reveal))
    return false;
  return true;
}

/// Seeded uniform sample without replacement from the filtered enumeration.
/// Scenarios are assigned round-robin over `params.scenario_ids`.
inline std::vector<Instance> sample_critical(const GeneratorParams& params) {
  if (params.scenario_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "no scenarios");
  const Scenario& first = find_scenario(params.scenario_ids.front());
  std::vector<Configuration<kNumAttributes>> pool;
  const auto masks_ok = [&](const Configuration<kNumAttributes>& cfg) {
    return (!params.require_hidden_exact_4 || cfg.hidden.size() == 4) &&
           (!params.require_reveal_exact_2 || cfg.reveal.size() == 2);
  };
  for_each_configuration<kNumAttributes>(kMaxHidden, [&](const Configuration<kNumAttributes>& cfg) {
    if (!masks_ok(cfg)) return;
    if (passes_critical_filters(make_instance(cfg, first), params)) pool.push_back(cfg);
  });
  if (pool.size() < params.sample_count) {
    throw Error(ErrorCode::kInsufficientInstances,
                std::to_string(pool.size()) + " candidates for " +
                    std::to_string(params.sample_count) + " requested");
  }
  std::mt19937_64 rng(params.seed);
  for (std::size_t i = 0; i < params.sample_count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  std::vector<Instance> out;
  out.reserve(params.sample_count);
  for (std::size_t i = 0; i < params.sample_count; ++i) {
    const auto& sid = params.scenario_ids[i % params.scenario_ids.size()];
    out.push_back(make_instance(pool[i], find_scenario(sid)));
  }
  return out;
}

/// Counts of valid configurations under several counting conventions.
struct ConfigurationCounts {
  int num_attributes = 0;
  int hidden_cap = 0;
  std::uint64_t labeled_hidden_sets = 0;    // distinct (values, matrix, hidden) with >= 1 reveal
  std::uint64_t labeled_tuples = 0;         // distinct (values, matrix, hidden, reveal)
  std::uint64_t relabeled_hidden_sets = 0;  // the former, up to proposal/attribute renaming
  std::uint64_t relabeled_tuples = 0;       // the latter, up to proposal/attribute renaming
};

namespace detail {

template <int A>
struct Relabeling {
  std::array<int, kNumProposals> proposals;
  std::array<int, A> attributes;
};

template <int A>
std::vector<Relabeling<A>> relabelings() {
  std::vector<Relabeling<A>> out;
  std::array<int, kNumProposals> pp{0, 1, 2};
  do {
    std::array<int, A> ap;
    std::iota(ap.begin(), ap.end(), 0);
    do out.push_back({pp, ap});
    while (std::next_permutation(ap.begin(), ap.end()));
  } while (std::next_permutation(pp.begin(), pp.end()));
  return out;
}

template <int A>
std::uint16_t relabel_mask(std::uint16_t mask, const Relabeling<A>& g) {
  // New cell (p, a) is old cell (g.proposals[p], g.attributes[a]).
  std::uint16_t out = 0;
  for (int p = 0; p < kNumProposals; ++p)
    for (int a = 0; a < A; ++a)
      if ((mask >> cell_index<A>(Cell{g.proposals[p], g.attributes[a]})) & 1U)
        out |= static_cast<std::uint16_t>(1U << cell_index<A>(Cell{p, a}));
  return out;
}

template <int A>
bool fixes_game(const Configuration<A>& c, const Relabeling<A>& g) {
  for (int a = 0; a < A; ++a)
    if (c.values.at(g.attributes[a]) != c.values.at(a)) return false;
  for (int p = 0; p < kNumProposals; ++p)
    for (int a = 0; a < A; ++a)
      if (c.matrix.at(Cell{g.proposals[p], g.attributes[a]}) != c.matrix.at(Cell{p, a})) return false;
  return relabel_mask<A>(c.hidden.bits(), g) == c.hidden.bits();
}

template <int A>
ConfigurationCounts count_impl(int hidden_cap) {
  ConfigurationCounts counts;
  counts.num_attributes = A;
  counts.hidden_cap = hidden_cap;
  const auto group = relabelings<A>();
  // Burnside: orbits = (1/|G|) * sum over elements of the number of group
  // elements fixing it.
  std::uint64_t fixed_hidden = 0, fixed_tuples = 0;
  bool have_last = false;
  Configuration<A> last;
  for_each_configuration<A>(hidden_cap, [&](const Configuration<A>& c) {
    ++counts.labeled_tuples;
    std::uint64_t stabilizer = 0, tuple_stabilizer = 0;
    for (const auto& g : group) {
      if (!fixes_game(c, g)) continue;
      ++stabilizer;
      if (relabel_mask<A>(c.reveal.bits(), g) == c.reveal.bits()) ++tuple_stabilizer;
    }
    fixed_tuples += tuple_stabilizer;
    const bool new_hidden = !have_last || last.values != c.values || last.matrix != c.matrix ||
                            last.hidden != c.hidden;
    if (new_hidden) {
      ++counts.labeled_hidden_sets;
      fixed_hidden += stabilizer;
      last = c;
      have_last = true;
    }
  });
  counts.relabeled_hidden_sets = fixed_hidden / group.size();
  counts.relabeled_tuples = fixed_tuples / group.size();
  return counts;
}

}  // namespace detail

/// `hidden_cap` < 0 means no cap on the hidden set size.
inline ConfigurationCounts count_configurations(int num_attributes, int hidden_cap = kMaxHidden) {
  switch (num_attributes) {
    case 2: return detail::count_impl<2>(hidden_cap < 0 ? 6 : hidden_cap);
    case 3: return detail::count_impl<3>(hidden_cap < 0 ? 9 : hidden_cap);
    default:
      throw Error(ErrorCode::kInvalidArgument, "num_attributes must be 2 or 3");
  }
}

}  // namespace mindgames
