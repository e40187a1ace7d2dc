#include "selfmod/utility.hpp"

#include <algorithm>
#include <cmath>

namespace selfmod {

namespace {

template <typename Vec, typename Key>
auto find_sorted(Vec& v, const Key& key) {
  auto it = std::lower_bound(
      v.begin(), v.end(), key,
      [](const auto& entry, const Key& k) { return entry.first < k; });
  return it;
}

}  // namespace

FeatureVector::FeatureVector(std::initializer_list<Entry> entries) {
  for (const auto& e : entries) set(e.first, e.second);
}

void FeatureVector::set(const std::string& name, double value) {
  auto it = find_sorted(entries_, name);
  if (it != entries_.end() && it->first == name) {
    it->second = value;
  } else {
    entries_.insert(it, {name, value});
  }
}

double FeatureVector::get(const std::string& name) const {
  auto it = find_sorted(entries_, name);
  return (it != entries_.end() && it->first == name) ? it->second : 0.0;
}

bool FeatureVector::has(const std::string& name) const {
  auto it = find_sorted(entries_, name);
  return it != entries_.end() && it->first == name;
}

void FeatureVector::mark_indicator(const std::string& name) {
  double v = get(name);
  if (v != 0.0 && v != 1.0) {
    throw Error(Errc::invalid_argument,
                "indicator feature '" + name + "' must be 0 or 1, got " +
                    std::to_string(v));
  }
  auto it = std::lower_bound(indicators_.begin(), indicators_.end(), name);
  if (it == indicators_.end() || *it != name) indicators_.insert(it, name);
}

bool FeatureVector::is_indicator(const std::string& name) const {
  return std::binary_search(indicators_.begin(), indicators_.end(), name);
}

void FeatureVector::validate() const {
  for (const auto& name : indicators_) {
    double v = get(name);
    if (v != 0.0 && v != 1.0) {
      throw Error(Errc::invalid_argument,
                  "indicator feature '" + name + "' must be 0 or 1");
    }
  }
}

UtilityFunction::UtilityFunction(std::initializer_list<Term> terms,
                                 bool normalized)
    : UtilityFunction(std::vector<Term>(terms), normalized) {}

UtilityFunction::UtilityFunction(std::vector<Term> terms, bool normalized)
    : terms_(std::move(terms)), normalized_(normalized) {
  std::sort(terms_.begin(), terms_.end());
  check_invariants();
}

void UtilityFunction::check_invariants() const {
  if (terms_.empty()) {
    throw Error(Errc::invalid_argument, "utility function needs at least one term");
  }
  for (size_t i = 1; i < terms_.size(); ++i) {
    if (terms_[i].first == terms_[i - 1].first) {
      throw Error(Errc::invalid_argument,
                  "duplicate term name '" + terms_[i].first + "'");
    }
  }
  if (normalized_) {
    double sum = 0.0;
    for (const auto& t : terms_) sum += std::abs(t.second);
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(Errc::invalid_argument,
                  "normalized flag set but absolute weights sum to " +
                      std::to_string(sum));
    }
  }
}

double UtilityFunction::weight(const std::string& name) const {
  auto it = find_sorted(terms_, name);
  return (it != terms_.end() && it->first == name) ? it->second : 0.0;
}

bool UtilityFunction::has_term(const std::string& name) const {
  auto it = find_sorted(terms_, name);
  return it != terms_.end() && it->first == name;
}

void Lottery::validate() const {
  double sum = 0.0;
  for (const auto& [p, f] : branches) {
    if (p < 0.0) {
      throw Error(Errc::invalid_lottery,
                  "lottery probability " + std::to_string(p) + " is negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::invalid_lottery,
                "lottery probabilities sum to " + std::to_string(sum));
  }
}

double evaluate(const UtilityFunction& u, const FeatureVector& f) {
  double total = 0.0;
  for (const auto& [name, w] : u.terms()) total += w * f.get(name);
  return total;
}

double expected_utility(const UtilityFunction& u, const Lottery& l) {
  l.validate();
  double total = 0.0;
  for (const auto& [p, f] : l.branches) total += p * evaluate(u, f);
  return total;
}

UtilityFunction renormalize(const UtilityFunction& u) {
  if (u.normalized()) return u;
  double sum = 0.0;
  for (const auto& t : u.terms()) sum += std::abs(t.second);
  if (sum == 0.0) {
    throw Error(Errc::degenerate_utility, "all weights are zero");
  }
  UtilityFunction out = u;
  for (auto& t : out.terms_) t.second /= sum;
  out.normalized_ = true;
  return out;
}

UtilityFunction add_commitment(const UtilityFunction& u,
                               const std::string& indicator, double penalty) {
  if (penalty < 0.0) {
    throw Error(Errc::invalid_argument, "commitment penalty must be >= 0");
  }
  UtilityFunction out = u;
  auto it = find_sorted(out.terms_, indicator);
  if (it != out.terms_.end() && it->first == indicator) {
    bool is_commitment = std::binary_search(out.commitment_terms_.begin(),
                                            out.commitment_terms_.end(),
                                            indicator);
    if (!is_commitment) {
      throw Error(Errc::name_collision,
                  "indicator '" + indicator +
                      "' collides with an existing non-indicator feature");
    }
    it->second -= penalty;
  } else {
    out.terms_.insert(it, {indicator, -penalty});
    auto cit = std::lower_bound(out.commitment_terms_.begin(),
                                out.commitment_terms_.end(), indicator);
    out.commitment_terms_.insert(cit, indicator);
  }
  out.normalized_ = false;
  return renormalize(out);
}

double weight_distance(const UtilityFunction& a, const UtilityFunction& b) {
  if (!a.normalized() || !b.normalized()) {
    throw Error(Errc::precondition,
                "weight_distance requires normalized utility functions");
  }
  double dist = 0.0;
  auto ia = a.terms().begin(), ea = a.terms().end();
  auto ib = b.terms().begin(), eb = b.terms().end();
  while (ia != ea || ib != eb) {
    if (ib == eb || (ia != ea && ia->first < ib->first)) {
      dist += std::abs(ia->second);
      ++ia;
    } else if (ia == ea || ib->first < ia->first) {
      dist += std::abs(ib->second);
      ++ib;
    } else {
      dist += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return dist;
}

const char* guard_mode_name(GuardMode m) {
  switch (m) {
    case GuardMode::none: return "none";
    case GuardMode::current_only: return "current-only";
    case GuardMode::full_chain: return "full-chain";
  }
  return "unknown";
}

GuardMode guard_mode_from_name(const std::string& name) {
  if (name == "none") return GuardMode::none;
  if (name == "current-only") return GuardMode::current_only;
  if (name == "full-chain") return GuardMode::full_chain;
  throw Error(Errc::invalid_argument, "unknown guard mode '" + name + "'");
}

const char* disclosure_mode_name(DisclosureMode m) {
  switch (m) {
    case DisclosureMode::full: return "full";
    case DisclosureMode::verified_terms: return "verified-terms";
    case DisclosureMode::none: return "none";
  }
  return "unknown";
}

ModificationLedger::ModificationLedger(UtilityFunction initial, GuardMode mode)
    : mode_(mode) {
  history_.push_back(std::move(initial));
}

const UtilityFunction& ModificationLedger::current() const {
  if (history_.empty()) {
    throw Error(Errc::invalid_ledger, "ledger has no history");
  }
  return history_.back();
}

void ModificationLedger::append(UtilityFunction u, AuditRecord audit) {
  if (history_.empty()) {
    throw Error(Errc::invalid_ledger, "ledger has no history");
  }
  history_.push_back(std::move(u));
  audits_.push_back(std::move(audit));
}

GuardReport guard_check(const ModificationLedger& ledger,
                        const UtilityFunction& candidate,
                        const Lottery& status_quo, const Lottery& adopted) {
  (void)candidate;
  if (ledger.empty()) {
    throw Error(Errc::invalid_ledger, "guard_check on empty ledger");
  }
  status_quo.validate();
  adopted.validate();

  GuardReport report;
  report.mode = ledger.guard_mode();

  size_t first = 0;
  size_t last = ledger.size();  // exclusive
  switch (ledger.guard_mode()) {
    case GuardMode::none:
      first = last;  // no comparisons required
      break;
    case GuardMode::current_only:
      first = last - 1;
      break;
    case GuardMode::full_chain:
      first = 0;
      break;
  }

  bool all_passed = true;
  for (size_t i = first; i < last; ++i) {
    const UtilityFunction& u = ledger.history()[i];
    GuardComparison cmp;
    cmp.history_index = i;
    cmp.status_quo_value = expected_utility(u, status_quo);
    cmp.adopted_value = expected_utility(u, adopted);
    bool is_current = (i + 1 == last);
    if (is_current) {
      cmp.passed = cmp.adopted_value > cmp.status_quo_value + kGuardStrictTol;
    } else {
      cmp.passed = cmp.adopted_value >= cmp.status_quo_value - kGuardHarmTol;
    }
    all_passed = all_passed && cmp.passed;
    report.comparisons.push_back(cmp);
  }
  report.accepted = all_passed;
  return report;
}

ApplyResult apply_modification(const Agent& agent,
                               const UtilityFunction& candidate,
                               const Lottery& status_quo,
                               const Lottery& adopted) {
  GuardReport report = guard_check(agent.ledger, candidate, status_quo, adopted);
  ApplyResult result{agent, report};
  if (report.accepted) {
    AuditRecord audit{candidate, status_quo, adopted, report};
    result.agent.ledger.append(candidate, std::move(audit));
  }
  return result;
}

}  // namespace selfmod
