#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "selfmod/errors.hpp"

namespace selfmod {

// A bag of named world quantities (paperclip counts, damage, money, ...).
// Features flagged as indicators must hold 0 or 1; they mark events such as
// a broken promise. Entries are kept sorted by name; lookups of absent
// features read as 0 so agents with different vocabularies can score the
// same outcome.
class FeatureVector {
 public:
  using Entry = std::pair<std::string, double>;

  FeatureVector() = default;
  FeatureVector(std::initializer_list<Entry> entries);

  void set(const std::string& name, double value);
  double get(const std::string& name) const;
  bool has(const std::string& name) const;

  // Flags a feature as an indicator; its value must be 0 or 1.
  void mark_indicator(const std::string& name);
  bool is_indicator(const std::string& name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<std::string>& indicators() const { return indicators_; }
  size_t size() const { return entries_.size(); }

  void validate() const;

  bool operator==(const FeatureVector& other) const {
    return entries_ == other.entries_ && indicators_ == other.indicators_;
  }

 private:
  std::vector<Entry> entries_;      // sorted by name
  std::vector<std::string> indicators_;  // sorted
};

// A weighted sum over named features. Weights may be negative ("hates
// paperclips"). When the normalized flag is set the absolute weights sum
// to 1, which makes "fraction of weight" questions well defined.
class UtilityFunction {
 public:
  using Term = std::pair<std::string, double>;

  UtilityFunction() = default;
  UtilityFunction(std::initializer_list<Term> terms, bool normalized = false);
  explicit UtilityFunction(std::vector<Term> terms, bool normalized = false);

  double weight(const std::string& name) const;  // 0 if absent
  bool has_term(const std::string& name) const;

  const std::vector<Term>& terms() const { return terms_; }
  bool normalized() const { return normalized_; }

  // Terms that were installed as commitment indicators via add_commitment.
  const std::vector<std::string>& commitment_terms() const {
    return commitment_terms_;
  }

  bool operator==(const UtilityFunction& other) const {
    return terms_ == other.terms_ && normalized_ == other.normalized_;
  }

 private:
  friend UtilityFunction renormalize(const UtilityFunction& u);
  friend UtilityFunction add_commitment(const UtilityFunction& u,
                                        const std::string& indicator,
                                        double penalty);
  friend struct UtilitySerde;

  void check_invariants() const;

  std::vector<Term> terms_;  // sorted by name
  std::vector<std::string> commitment_terms_;  // sorted
  bool normalized_ = false;
};

// Probability-weighted set of outcomes. Probabilities must be nonnegative
// and sum to 1 within 1e-9.
struct Lottery {
  using Branch = std::pair<double, FeatureVector>;
  std::vector<Branch> branches;

  Lottery() = default;
  Lottery(std::initializer_list<Branch> b) : branches(b) {}

  static Lottery degenerate(FeatureVector f) {
    Lottery l;
    l.branches.emplace_back(1.0, std::move(f));
    return l;
  }

  void validate() const;
};

double evaluate(const UtilityFunction& u, const FeatureVector& f);
double expected_utility(const UtilityFunction& u, const Lottery& l);

// Scales weights by a positive constant so absolute weights sum to 1.
// All-zero weights are a degenerate-utility error. Already-normalized
// functions are returned unchanged, so the operation is exactly idempotent.
UtilityFunction renormalize(const UtilityFunction& u);

// Returns u plus a term (indicator -> -penalty), renormalized. Ratios among
// pre-existing terms are preserved. Adding on top of an existing commitment
// term deepens it; colliding with an ordinary feature is an error.
UtilityFunction add_commitment(const UtilityFunction& u,
                               const std::string& indicator, double penalty);

// L1 distance over the union of term names. Both inputs must be normalized.
double weight_distance(const UtilityFunction& a, const UtilityFunction& b);

enum class GuardMode { none, current_only, full_chain };

const char* guard_mode_name(GuardMode m);
GuardMode guard_mode_from_name(const std::string& name);

// Acceptance tolerances: a change must strictly improve the current self
// (> kGuardStrictTol) and must not harm strictly older selves beyond
// kGuardHarmTol.
inline constexpr double kGuardStrictTol = 1e-9;
inline constexpr double kGuardHarmTol = 1e-9;

struct GuardComparison {
  size_t history_index = 0;
  double status_quo_value = 0.0;
  double adopted_value = 0.0;
  bool passed = false;
};

struct GuardReport {
  bool accepted = false;
  GuardMode mode = GuardMode::none;
  std::vector<GuardComparison> comparisons;
};

struct AuditRecord {
  UtilityFunction candidate;
  Lottery status_quo;
  Lottery adopted;
  GuardReport report;
};

// Ordered history of an agent's utility functions plus the policy that
// gates further changes. The last entry is the current function.
class ModificationLedger {
 public:
  ModificationLedger() = default;
  ModificationLedger(UtilityFunction initial, GuardMode mode);

  const UtilityFunction& current() const;
  const std::vector<UtilityFunction>& history() const { return history_; }
  const std::vector<AuditRecord>& audits() const { return audits_; }
  GuardMode guard_mode() const { return mode_; }
  bool empty() const { return history_.empty(); }
  size_t size() const { return history_.size(); }

  void append(UtilityFunction u, AuditRecord audit);

 private:
  std::vector<UtilityFunction> history_;
  std::vector<AuditRecord> audits_;  // audits_[k] recorded when history_[k+1] was adopted
  GuardMode mode_ = GuardMode::none;
};

// How much of an agent's utility function others can see.
enum class DisclosureMode { full, verified_terms, none };

const char* disclosure_mode_name(DisclosureMode m);

struct Agent {
  std::string id;
  ModificationLedger ledger;
  DisclosureMode disclosure = DisclosureMode::none;
};

// Compares keeping the status quo against adopting the candidate, under the
// current utility function alone (current_only) or under every function in
// the history (full_chain). Accept means every required comparison passed.
GuardReport guard_check(const ModificationLedger& ledger,
                        const UtilityFunction& candidate,
                        const Lottery& status_quo, const Lottery& adopted);

struct ApplyResult {
  Agent agent;
  GuardReport report;
};

// Runs guard_check; on accept returns the agent with the candidate appended
// (audit stored), otherwise the agent unchanged plus the rejecting report.
ApplyResult apply_modification(const Agent& agent,
                               const UtilityFunction& candidate,
                               const Lottery& status_quo,
                               const Lottery& adopted);

}  // namespace selfmod
