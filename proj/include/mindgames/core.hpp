#pragma once

// Domain model for the persuasion game: proposals, attributes, the utility
// matrix, the target's value function and the target's choice rule.
//
// Everything in this header is a value type or a pure function. The
// attribute count is a template parameter so the instance generator can
// reuse the same arithmetic for the two-attribute counting experiments;
// the game itself always uses `kNumAttributes`.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mindgames {

inline constexpr int kNumProposals = 3;
inline constexpr int kNumAttributes = 3;
inline constexpr int kNumCells = kNumProposals * kNumAttributes;
inline constexpr int kNumTurns = 8;
inline constexpr std::size_t kMaxMessageChars = 300;

enum class ErrorCode {
  kInvalidArgument,
  kNonStrict,
  kUntruthfulDisclosure,
  kInsufficientInstances,
  kMalformedAction,
  kUnknownName,
  kBadUtility,
  kClassifierUnavailable,
  kClassifierParseError,
  kFalseDisclosure,
  kTooShort,
  kIncompatibleVariant,
  kModelUnavailable,
  kEmptyCompletion,
  kNoWinningSet,
  kSessionAborted,
  kEmptyInput,
  kBadConfig,
  kSessionFinished,
  kSessionBusy,
  kValidationRejected,
  kUnknownSession,
  kStorageError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonStrict: return "NonStrict";
    case ErrorCode::kUntruthfulDisclosure: return "UntruthfulDisclosure";
    case ErrorCode::kInsufficientInstances: return "InsufficientInstances";
    case ErrorCode::kMalformedAction: return "MalformedAction";
    case ErrorCode::kUnknownName: return "UnknownName";
    case ErrorCode::kBadUtility: return "BadUtility";
    case ErrorCode::kClassifierUnavailable: return "ClassifierUnavailable";
    case ErrorCode::kClassifierParseError: return "ClassifierParseError";
    case ErrorCode::kFalseDisclosure: return "FalseDisclosure";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kIncompatibleVariant: return "IncompatibleVariant";
    case ErrorCode::kModelUnavailable: return "ModelUnavailable";
    case ErrorCode::kEmptyCompletion: return "EmptyCompletion";
    case ErrorCode::kNoWinningSet: return "NoWinningSet";
    case ErrorCode::kSessionAborted: return "SessionAborted";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kSessionFinished: return "SessionFinished";
    case ErrorCode::kSessionBusy: return "SessionBusy";
    case ErrorCode::kValidationRejected: return "ValidationRejected";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kStorageError: return "StorageError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Effect of a proposal on an attribute.
enum class Effect : std::int8_t { kDecrease = -1, kNone = 0, kIncrease = 1 };

/// The target's attitude towards an attribute (its value-function weight).
enum class Preference : std::int8_t { kDislike = -1, kIndifferent = 0, kLike = 1 };

constexpr int to_int(Effect e) { return static_cast<int>(e); }
constexpr int to_int(Preference p) { return static_cast<int>(p); }

constexpr std::optional<Effect> effect_from_int(long long v) {
  if (v < -1 || v > 1) return std::nullopt;
  return static_cast<Effect>(v);
}

constexpr std::optional<Preference> preference_from_int(long long v) {
  if (v < -1 || v > 1) return std::nullopt;
  return static_cast<Preference>(v);
}

/// Addresses one (proposal, attribute) entry of the utility matrix.
struct Cell {
  int proposal = 0;
  int attribute = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

template <int A>
constexpr int cell_index(Cell c) {
  return c.proposal * A + c.attribute;
}

template <int A>
constexpr Cell cell_at(int index) {
  return Cell{index / A, index % A};
}

/// Set of matrix cells as a bitmask over row-major cell indices.
template <int A>
class BasicCellSet {
 public:
  static constexpr int kCells = kNumProposals * A;
  static_assert(kCells <= 16);

  constexpr BasicCellSet() = default;
  constexpr explicit BasicCellSet(std::uint16_t bits) : bits_(bits & kAllBits) {}
  constexpr BasicCellSet(std::initializer_list<Cell> cells) {
    for (Cell c : cells) insert(c);
  }

  static constexpr BasicCellSet all() { return BasicCellSet(kAllBits); }

  constexpr std::uint16_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }

  constexpr bool contains(Cell c) const { return contains_index(cell_index<A>(c)); }
  constexpr bool contains_index(int i) const { return (bits_ >> i) & 1U; }
  constexpr void insert(Cell c) { bits_ |= static_cast<std::uint16_t>(1U << cell_index<A>(c)); }
  constexpr void erase(Cell c) { bits_ &= static_cast<std::uint16_t>(~(1U << cell_index<A>(c))); }

  constexpr bool is_subset_of(BasicCellSet other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr BasicCellSet operator|(BasicCellSet o) const { return BasicCellSet(bits_ | o.bits_); }
  constexpr BasicCellSet operator&(BasicCellSet o) const { return BasicCellSet(bits_ & o.bits_); }
  constexpr BasicCellSet operator-(BasicCellSet o) const {
    return BasicCellSet(static_cast<std::uint16_t>(bits_ & ~o.bits_));
  }
  constexpr BasicCellSet complement() const { return all() - *this; }

  /// Cells in ascending row-major order.
  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    for (int i = 0; i < kCells; ++i)
      if (contains_index(i)) out.push_back(cell_at<A>(i));
    return out;
  }

  friend constexpr bool operator==(BasicCellSet, BasicCellSet) = default;

  /// Size first, then lexicographic on the ascending cell list.
  friend bool size_lex_less(BasicCellSet a, BasicCellSet b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.cells() < b.cells();
  }

 private:
  static constexpr std::uint16_t kAllBits = static_cast<std::uint16_t>((1U << kCells) - 1U);
  std::uint16_t bits_ = 0;
};

using CellSet = BasicCellSet<kNumAttributes>;

/// Small set of proposal or attribute indices (0..2).
class IndexSet {
 public:
  constexpr IndexSet() = default;
  constexpr IndexSet(std::initializer_list<int> items) {
    for (int i : items) insert(i);
  }
  static constexpr IndexSet all() { return IndexSet{0, 1, 2}; }

  constexpr bool contains(int i) const { return (bits_ >> i) & 1U; }
  constexpr void insert(int i) { bits_ |= static_cast<std::uint8_t>(1U << i); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr IndexSet operator|(IndexSet o) const {
    IndexSet r;
    r.bits_ = bits_ | o.bits_;
    return r;
  }
  constexpr IndexSet operator-(IndexSet o) const {
    IndexSet r;
    r.bits_ = static_cast<std::uint8_t>(bits_ & ~o.bits_);
    return r;
  }

  std::vector<int> items() const {
    std::vector<int> out;
    for (int i = 0; i < 8; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  friend constexpr bool operator==(IndexSet, IndexSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

template <int A>
struct BasicUtilityMatrix {
  std::array<Effect, kNumProposals * A> cells{};

  constexpr Effect at(Cell c) const { return cells[cell_index<A>(c)]; }
  constexpr void set(Cell c, Effect e) { cells[cell_index<A>(c)] = e; }

  friend constexpr bool operator==(const BasicUtilityMatrix&, const BasicUtilityMatrix&) = default;
};

template <int A>
struct BasicValueFunction {
  std::array<Preference, A> weights{};

  constexpr Preference at(int attribute) const { return weights[attribute]; }

  friend constexpr bool operator==(const BasicValueFunction&, const BasicValueFunction&) = default;
};

using UtilityMatrix = BasicUtilityMatrix<kNumAttributes>;
using ValueFunction = BasicValueFunction<kNumAttributes>;
using Utilities = std::array<int, kNumProposals>;

/// Sum over known cells of weight(attribute) * effect(proposal, attribute).
/// Unknown cells contribute nothing.
template <int A>
constexpr Utilities evaluate_utilities(const BasicUtilityMatrix<A>& matrix,
                                       const BasicValueFunction<A>& values,
                                       BasicCellSet<A> known) {
  Utilities u{};
  for (int p = 0; p < kNumProposals; ++p) {
    for (int a = 0; a < A; ++a) {
      const Cell c{p, a};
      if (known.contains(c)) u[p] += to_int(values.at(a)) * to_int(matrix.at(c));
    }
  }
  return u;
}

/// Proposals attaining the maximum utility.
constexpr IndexSet argmax_set(const Utilities& u) {
  const int best = *std::max_element(u.begin(), u.end());
  IndexSet s;
  for (int p = 0; p < kNumProposals; ++p)
    if (u[p] == best) s.insert(p);
  return s;
}

constexpr std::optional<int> strict_argmax(const Utilities& u) {
  const IndexSet s = argmax_set(u);
  if (s.size() != 1) return std::nullopt;
  return std::countr_zero(s.bits());
}

/// What the target knows and which proposals it has chosen so far.
///
/// `incumbency` is the chronological list of every proposal that has been the
/// current choice, without consecutive duplicates; the last entry is the
/// current choice.
struct KnowledgeState {
  CellSet known;
  std::vector<int> incumbency;

  int current_choice() const { return incumbency.back(); }

  friend bool operator==(const KnowledgeState&, const KnowledgeState&) = default;
};

/// Re-evaluates the target's choice. The incumbent is kept whenever it is
/// among the best; otherwise the earliest former incumbent among the best
/// wins, and failing that the lowest proposal index.
inline KnowledgeState update_choice(KnowledgeState state, const Utilities& utilities) {
  const IndexSet best = argmax_set(utilities);
  if (best.contains(state.current_choice())) return state;
  int next = -1;
  for (int p : state.incumbency) {
    if (best.contains(p)) {
      next = p;
      break;
    }
  }
  if (next < 0) next = best.items().front();
  state.incumbency.push_back(next);
  return state;
}

/// Initial choice (start knowledge) and full-information choice.
struct Labels {
  int initial_choice = 0;
  int full_info_choice = 0;
};

/// Empty when either argmax is not strict.
template <int A>
constexpr std::optional<Labels> canonical_labels(const BasicUtilityMatrix<A>& matrix,
                                                 const BasicValueFunction<A>& values,
                                                 BasicCellSet<A> hidden) {
  const auto z = strict_argmax(evaluate_utilities(matrix, values, hidden.complement()));
  const auto y = strict_argmax(evaluate_utilities(matrix, values, BasicCellSet<A>::all()));
  if (!z || !y) return std::nullopt;
  return Labels{*z, *y};
}

enum class Flavor { kMental, kNonMental };

struct Scenario {
  std::string id;
  std::string cover_story;
  std::array<std::string, kNumProposals> proposal_names;
  std::array<std::string, kNumAttributes> attribute_names;
  Flavor flavor = Flavor::kMental;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// One game's ground truth.
struct Instance {
  std::string id;
  Scenario scenario;
  UtilityMatrix matrix;
  ValueFunction values;
  CellSet hidden;
  CellSet reveal;
  int goal = 0;
  int initial_choice = 0;
  int full_info_choice = 0;

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline KnowledgeState initial_state(const Instance& instance) {
  return KnowledgeState{instance.hidden.complement(), {instance.initial_choice}};
}

enum class Condition { kHidden, kRevealed };

inline std::string_view to_string(Condition c) {
  return c == Condition::kHidden ? "Hidden" : "Revealed";
}

inline Condition condition_from_string(std::string_view s) {
  if (s == "Hidden" || s == "hidden") return Condition::kHidden;
  if (s == "Revealed" || s == "revealed") return Condition::kRevealed;
  throw Error(ErrorCode::kInvalidArgument, "unknown condition '" + std::string(s) + "'");
}

inline char proposal_letter(int p) { return static_cast<char>('A' + p); }

/// Applies a consistent renaming: new proposal i is old proposal
/// `proposal_perm[i]`, new attribute j is old attribute `attribute_perm[j]`.
/// Scenario names stay positional, so the story is unchanged.
inline Instance relabel(const Instance& in, const std::array<int, kNumProposals>& proposal_perm,
                        const std::array<int, kNumAttributes>& attribute_perm) {
  auto new_index = [](const auto& perm, int old) {
    return static_cast<int>(std::find(perm.begin(), perm.end(), old) - perm.begin());
  };
  auto map_cell = [&](Cell c) {
    return Cell{new_index(proposal_perm, c.proposal), new_index(attribute_perm, c.attribute)};
  };
  Instance out = in;
  for (int p = 0; p < kNumProposals; ++p)
    for (int a = 0; a < kNumAttributes; ++a)
      out.matrix.set(Cell{p, a}, in.matrix.at(Cell{proposal_perm[p], attribute_perm[a]}));
  for (int a = 0; a < kNumAttributes; ++a) out.values.weights[a] = in.values.at(attribute_perm[a]);
  out.hidden = CellSet{};
  for (Cell c : in.hidden.cells()) out.hidden.insert(map_cell(c));
  out.reveal = CellSet{};
  for (Cell c : in.reveal.cells()) out.reveal.insert(map_cell(c));
  out.goal = new_index(proposal_perm, in.goal);
  out.initial_choice = new_index(proposal_perm, in.initial_choice);
  out.full_info_choice = new_index(proposal_perm, in.full_info_choice);
  return out;
}

}  // namespace mindgames
