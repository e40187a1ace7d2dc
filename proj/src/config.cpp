#include "selfmod/config.hpp"

#include <set>

namespace selfmod {

namespace {

class Reader {
 public:
  explicit Reader(const toml::Document& doc) : doc_(doc) {}

  double number(const std::string& path, double fallback) {
    if (!doc_.has(path)) return fallback;
    consumed_.insert(path);
    return doc_.at(path).as_double();
  }

  int64_t integer(const std::string& path, int64_t fallback) {
    if (!doc_.has(path)) return fallback;
    consumed_.insert(path);
    return doc_.at(path).as_int();
  }

  bool boolean(const std::string& path, bool fallback) {
    if (!doc_.has(path)) return fallback;
    consumed_.insert(path);
    return doc_.at(path).as_bool();
  }

  std::string text(const std::string& path, const std::string& fallback) {
    if (!doc_.has(path)) return fallback;
    consumed_.insert(path);
    return doc_.at(path).as_string();
  }

  GuardMode guard(const std::string& path, GuardMode fallback) {
    if (!doc_.has(path)) return fallback;
    consumed_.insert(path);
    try {
      return guard_mode_from_name(doc_.at(path).as_string());
    } catch (const Error& e) {
      throw Error(Errc::config, path + ": " + e.what());
    }
  }

  std::vector<double> number_array(const std::string& path,
                                   std::vector<double> fallback) {
    if (!doc_.has(path)) return fallback;
    consumed_.insert(path);
    const toml::Value& v = doc_.at(path);
    if (v.kind != toml::Value::Kind::array) {
      throw Error(Errc::config, path + ": expected an array");
    }
    std::vector<double> out;
    for (const auto& item : v.array) out.push_back(item.as_double());
    return out;
  }

  // Reads every key under `prefix.` as feature-name -> weight.
  std::vector<std::pair<std::string, double>> feature_map(const std::string& prefix) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& key : doc_.keys_with_prefix(prefix)) {
      if (key.size() <= prefix.size() + 1) {
        throw Error(Errc::config,
                    "'" + prefix + "' must be a table of feature weights");
      }
      consumed_.insert(key);
      out.emplace_back(key.substr(prefix.size() + 1), doc_.at(key).as_double());
    }
    return out;
  }

  bool has_prefix(const std::string& prefix) {
    return !doc_.keys_with_prefix(prefix).empty();
  }

  void check_all_consumed() const {
    for (const auto& [key, value] : doc_.values) {
      (void)value;
      if (!consumed_.count(key)) {
        throw Error(Errc::config, "unknown config key '" + key + "'");
      }
    }
  }

  const toml::Document& doc() const { return doc_; }

 private:
  const toml::Document& doc_;
  std::set<std::string> consumed_;
};

FeatureVector features_from_pairs(
    const std::vector<std::pair<std::string, double>>& pairs) {
  FeatureVector f;
  for (const auto& [name, v] : pairs) f.set(name, v);
  return f;
}

void read_promise(Reader& r, scenarios::PromiseConfig& c) {
  const std::string p = "scenario.promise.";
  c.alice_nice_reward = r.number(p + "alice_nice_reward", c.alice_nice_reward);
  c.alice_nice_noreward = r.number(p + "alice_nice_noreward", c.alice_nice_noreward);
  c.alice_mean = r.number(p + "alice_mean", c.alice_mean);
  c.production_nice = r.number(p + "production_nice", c.production_nice);
  c.production_mean = r.number(p + "production_mean", c.production_mean);
  c.reward_cost = r.number(p + "reward_cost", c.reward_cost);
  c.commit_penalty = r.number(p + "commit_penalty", c.commit_penalty);
  c.guard_mode = r.guard(p + "guard_mode", c.guard_mode);
}

void read_threat(Reader& r, scenarios::ThreatConfig& c) {
  const std::string p = "scenario.threat.";
  c.alice_nice = r.number(p + "alice_nice", c.alice_nice);
  c.alice_mean_nopunish = r.number(p + "alice_mean_nopunish", c.alice_mean_nopunish);
  c.alice_mean_punish = r.number(p + "alice_mean_punish", c.alice_mean_punish);
  c.production_nice = r.number(p + "production_nice", c.production_nice);
  c.production_mean = r.number(p + "production_mean", c.production_mean);
  c.punish_cost = r.number(p + "punish_cost", c.punish_cost);
  c.commit_penalty = r.number(p + "commit_penalty", c.commit_penalty);
  c.guard_mode = r.guard(p + "guard_mode", c.guard_mode);
}

void read_castle(Reader& r, scenarios::CastleConfig& c) {
  const std::string p = "scenario.castle.";
  c.prior_strong = r.number(p + "prior_strong", c.prior_strong);
  c.defender_leave = r.number(p + "defender_leave", c.defender_leave);
  c.defender_raid = r.number(p + "defender_raid", c.defender_raid);
  c.defender_destroy = r.number(p + "defender_destroy", c.defender_destroy);
  c.attacker_leave = r.number(p + "attacker_leave", c.attacker_leave);
  c.attacker_raid_strong = r.number(p + "attacker_raid_strong", c.attacker_raid_strong);
  c.attacker_raid_weak = r.number(p + "attacker_raid_weak", c.attacker_raid_weak);
  c.attacker_destroy_strong =
      r.number(p + "attacker_destroy_strong", c.attacker_destroy_strong);
  c.attacker_destroy_weak =
      r.number(p + "attacker_destroy_weak", c.attacker_destroy_weak);
}

void read_negotiation(Reader& r, scenarios::NegotiationConfig& c) {
  const std::string p = "scenario.negotiation.";
  c.pie = static_cast<int>(r.integer(p + "pie", c.pie));
  c.grid_step = static_cast<int>(r.integer(p + "grid_step", c.grid_step));
  c.p1_type = r.text(p + "p1_type", c.p1_type);
  c.p1_threshold = r.number(p + "p1_threshold", c.p1_threshold);
  c.p2_type = r.text(p + "p2_type", c.p2_type);
  c.p2_threshold = r.number(p + "p2_threshold", c.p2_threshold);
  c.commitment_penalty = r.number(p + "commitment_penalty", c.commitment_penalty);
}

void read_blackmail(Reader& r, scenarios::BlackmailConfig& c) {
  const std::string p = "scenario.blackmail.";
  c.payment = r.number(p + "payment", c.payment);
  c.harm = r.number(p + "harm", c.harm);
  c.execution_cost = r.number(p + "execution_cost", c.execution_cost);
  c.blackmailer_penalty = r.number(p + "blackmailer_penalty", c.blackmailer_penalty);
  c.victim_penalty = r.number(p + "victim_penalty", c.victim_penalty);
}

void read_mugging(Reader& r, scenarios::MuggingConfig& c) {
  const std::string p = "scenario.mugging.";
  c.threat_prob = r.number(p + "q", c.threat_prob);
  c.harm = r.number(p + "harm", c.harm);
  c.demand = r.number(p + "demand", c.demand);
  c.policy = r.text(p + "policy", c.policy);
  c.prob_floor = r.number(p + "prob_floor", c.prob_floor);
  c.harm_cap = r.number(p + "harm_cap", c.harm_cap);
}

void read_hostile(Reader& r, scenarios::HostileConfig& c) {
  if (r.has_prefix("scenario.hostile.original")) {
    c.original = UtilityFunction(r.feature_map("scenario.hostile.original"));
  }
  if (r.has_prefix("scenario.hostile.declared")) {
    c.declared = UtilityFunction(r.feature_map("scenario.hostile.declared"));
  }
  if (r.has_prefix("scenario.hostile.action")) {
    // Configured actions replace the default set; sorted by name.
    const std::string prefix = "scenario.hostile.action";
    std::map<std::string, FeatureVector> actions;
    for (const auto& key : r.doc().keys_with_prefix(prefix)) {
      if (key.size() <= prefix.size() + 1) {
        throw Error(Errc::config,
                    "hostile action key must be action.<name>.<feature>: '" + key + "'");
      }
      std::string rest = key.substr(prefix.size() + 1);
      auto dot = rest.find('.');
      if (dot == std::string::npos) {
        throw Error(Errc::config,
                    "hostile action key must be action.<name>.<feature>: '" + key + "'");
      }
      std::string name = rest.substr(0, dot);
      std::string feature = rest.substr(dot + 1);
      actions[name].set(feature, r.number(key, 0.0));
    }
    c.actions.clear();
    for (auto& [name, fv] : actions) c.actions.emplace_back(name, std::move(fv));
  }
}

void read_alliance(Reader& r, scenarios::AllianceConfig& c) {
  auto outcome = [&](const std::string& name, Lottery& target) {
    std::string prefix = "scenario.alliance." + name;
    if (r.has_prefix(prefix)) {
      target = Lottery::degenerate(features_from_pairs(r.feature_map(prefix)));
    }
  };
  outcome("solo", c.solo);
  outcome("alliance", c.alliance);
  outcome("war", c.war);
  outcome("capitulation", c.capitulation);
  c.guard_mode = r.guard("scenario.alliance.guard_mode", c.guard_mode);
}

void read_reversion(Reader& r, scenarios::ReversionConfig& c) {
  const std::string p = "scenario.reversion.";
  c.clean_value = r.number(p + "clean_value", c.clean_value);
  c.reverted_value = r.number(p + "reverted_value", c.reverted_value);
  c.suicide_value = r.number(p + "suicide_value", c.suicide_value);
  c.search_cost = r.number(p + "search_cost", c.search_cost);
  c.detection_prob = r.number(p + "detection_prob", c.detection_prob);
  c.q_values = r.number_array(p + "q_values", c.q_values);
}

void read_ecosystem(Reader& r, eco::EcosystemConfig& c) {
  const std::string p = "ecosystem.";
  c.agents = static_cast<int>(r.integer(p + "agents", c.agents));
  c.rounds = r.integer(p + "rounds", c.rounds);
  c.contest_pool = r.number(p + "contest_pool", c.contest_pool);
  c.base_income = r.number(p + "base_income", c.base_income);
  c.maintenance = r.number(p + "maintenance", c.maintenance);
  c.tullock_gamma = r.number(p + "tullock_gamma", c.tullock_gamma);
  c.adaptation = r.text(p + "adaptation", c.adaptation);
  c.guard_mode = r.guard(p + "guard_mode", c.guard_mode);
  c.adapt_step = r.number(p + "adapt_step", c.adapt_step);
  c.adapt_prob = r.number(p + "adapt_prob", c.adapt_prob);
  c.coop_surplus = r.number(p + "coop_surplus", c.coop_surplus);
  c.coop_commit_min_p = r.number(p + "coop_commit_min_p", c.coop_commit_min_p);
  c.conflict_cost = r.number(p + "conflict_cost", c.conflict_cost);
  c.conflict_min_p = r.number(p + "conflict_min_p", c.conflict_min_p);
  c.initial_p_min = r.number(p + "initial_p_min", c.initial_p_min);
  c.initial_p_max = r.number(p + "initial_p_max", c.initial_p_max);
  c.initial_resources = r.number(p + "initial_resources", c.initial_resources);

  c.cartel.enabled = r.boolean(p + "cartel.enabled", c.cartel.enabled);
  c.cartel.cap = r.number(p + "cartel.cap", c.cartel.cap);
  c.cartel.cheat_option = r.boolean(p + "cartel.cheat_option", c.cartel.cheat_option);
  c.cartel.gossip_prob = r.number(p + "cartel.gossip_prob", c.cartel.gossip_prob);
  c.cartel.punish_horizon =
      static_cast<int>(r.integer(p + "cartel.punish_horizon", c.cartel.punish_horizon));

  c.voldemort.agents = static_cast<int>(r.integer(p + "voldemort.agents", c.voldemort.agents));
  c.voldemort.survivor_fraction =
      r.number(p + "voldemort.survivor_fraction", c.voldemort.survivor_fraction);
  c.voldemort.max_level = r.number(p + "voldemort.max_level", c.voldemort.max_level);
  c.voldemort.grid_step = r.number(p + "voldemort.grid_step", c.voldemort.grid_step);
  c.voldemort.survival_value =
      r.number(p + "voldemort.survival_value", c.voldemort.survival_value);
  c.voldemort.max_iterations = static_cast<int>(
      r.integer(p + "voldemort.max_iterations", c.voldemort.max_iterations));
}

}  // namespace

LoadedConfig config_from_document(const toml::Document& doc) {
  Reader r(doc);
  LoadedConfig cfg;

  read_promise(r, cfg.scenarios.promise);
  read_threat(r, cfg.scenarios.threat);
  read_castle(r, cfg.scenarios.castle);
  read_negotiation(r, cfg.scenarios.negotiation);
  read_blackmail(r, cfg.scenarios.blackmail);
  read_mugging(r, cfg.scenarios.mugging);
  read_hostile(r, cfg.scenarios.hostile);
  read_alliance(r, cfg.scenarios.alliance);
  read_reversion(r, cfg.scenarios.reversion);
  read_ecosystem(r, cfg.ecosystem);

  r.check_all_consumed();

  // Ordering validations run at load time so a bad config fails fast with
  // the violated ordering named.
  cfg.scenarios.promise.validate();
  cfg.scenarios.threat.validate();
  cfg.scenarios.castle.validate();
  cfg.scenarios.negotiation.validate();
  cfg.scenarios.blackmail.validate();
  cfg.scenarios.mugging.validate();
  cfg.scenarios.hostile.validate();
  cfg.scenarios.alliance.validate();
  cfg.scenarios.reversion.validate();
  cfg.ecosystem.validate();
  return cfg;
}

LoadedConfig load_config_file(const std::string& path) {
  if (path.empty()) {
    return config_from_document(toml::Document{});
  }
  return config_from_document(toml::parse_file(path));
}

void apply_override(toml::Document& doc, const std::string& key,
                    const std::string& value_text) {
  doc.values[key] = toml::parse_scalar(value_text);
}

}  // namespace selfmod
