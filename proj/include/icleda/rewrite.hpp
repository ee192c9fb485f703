/// Rule engine: a multiset of molecular species rewritten to a fixpoint.
///
/// Six rules are enumerated, each tagged with the step of the calculus it
/// performs:
///   hybridize    two free strands bind on an exact sensitive complement
///                pair and form an inert duplex
///   amplify      an unblocked loop template emits its product strand with
///                unbounded count; the loop itself is catalytic
///   block        a free strand containing the complement of a free loop
///                site binds the bare loop and silences it
///   unblock      a signal strand removes the single trigger of a blocked
///                loop; the trigger leaves as a sealed waste duplex
///   unblock2     same, on a loop blocked at two or more sites
///   displace     a signal strand removes a strand bound to another bound
///                strand (e.g. the protector of a one-site AND gate)
///
/// Instances are ordered by the joint apartness of the driving complement
/// pair (lower runs first), then rule tag, then a canonical key, so the
/// default schedule is deterministic. Randomized schedules are available
/// for confluence testing.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "icleda/strand.hpp"

namespace icleda {

/// Count in N ∪ {unbounded}. Consuming from an unbounded pool leaves it
/// unbounded; adding saturates.
class mol_count {
 public:
  mol_count() = default;
  static mol_count finite(std::uint64_t n) { return mol_count(n, false); }
  static mol_count unbounded() { return mol_count(0, true); }

  bool is_unbounded() const { return unbounded_; }
  std::uint64_t value() const { return value_; }  // meaningful when finite

  mol_count plus(const mol_count& o) const;
  /// One unit removed; returns the remaining count.
  mol_count consume_one() const;

  bool operator==(const mol_count& o) const {
    return unbounded_ == o.unbounded_ && (unbounded_ || value_ == o.value_);
  }

 private:
  mol_count(std::uint64_t v, bool u) : value_(v), unbounded_(u) {}
  std::uint64_t value_ = 0;
  bool unbounded_ = false;
};

/// Multiset of species keyed by canonical rendering.
class soup {
 public:
  void add(const species& sp, mol_count n);
  void add(const std::string& key, const species& sp, mol_count n);
  /// Removes one unit; the species must be present.
  void consume_one(const std::string& key);

  bool contains(const std::string& key) const { return items_.count(key) != 0; }
  mol_count count_of(const std::string& key) const;
  const species& at(const std::string& key) const { return items_.at(key).sp; }
  std::size_t distinct_species() const { return items_.size(); }

  const std::map<std::string, std::pair<species, mol_count>>& items() const { return items_; }

 private:
  struct item {
    species sp;
    mol_count n;
  };
  // exposed via items(); stored sorted so rule enumeration is deterministic
  std::map<std::string, std::pair<species, mol_count>> items_;
};

enum class rule_tag { hybridize, amplify, block, unblock, unblock2, displace };

int rule_equation(rule_tag t);
std::string rule_name(rule_tag t);

struct rule_instance {
  rule_tag tag;
  std::vector<std::string> consumed;              // keys, one unit each
  std::vector<std::pair<species, mol_count>> produced;
  std::vector<std::string> reactant_display;      // for traces (includes catalysts)
  std::vector<std::string> product_display;
  std::size_t apartness = 0;                      // joint apartness of the driving pair
  std::string sort_key;
};

struct trace_entry {
  std::size_t step = 0;
  rule_tag tag;
  std::vector<std::string> reactants;
  std::vector<std::string> products;
  std::size_t apartness = 0;
};

std::string format_trace_entry(const trace_entry& e);

enum class termination { fixpoint, step_limit };

struct fixpoint_result {
  soup final_soup;
  std::set<std::string> signals;
  std::vector<trace_entry> trace;
  std::size_t steps = 0;
  termination reason = termination::fixpoint;
};

/// All rule applications that would change the soup, sorted by priority.
std::vector<rule_instance> enumerate_rules(const soup& s);

/// Applies one instance (one unit of each consumed reactant).
void apply_rule(soup& s, const rule_instance& inst);

/// Applies the highest-priority instance; returns the trace entry, or
/// nullopt when the soup is at a fixpoint.
std::optional<trace_entry> step(soup& s);

/// Chooses among applicable instances; given the instance list, returns the
/// index to apply. The default scheduler picks index 0.
using scheduler = std::function<std::size_t(const std::vector<rule_instance>&)>;

scheduler deterministic_scheduler();
scheduler random_scheduler(std::uint64_t seed);

struct run_options {
  std::size_t step_limit = 10000;
  scheduler choose;                                   // default: deterministic
  std::function<void(const soup&, const trace_entry&)> observer;  // optional
  bool record_trace = true;
};

/// Rewrites until no instance changes the soup, or the step limit is hit
/// (reported in the result, not thrown). step_limit must be >= 1.
fixpoint_result run_to_fixpoint(soup s, const run_options& opts = {});

/// Names of signals realized by free strands present with count >= 1.
std::set<std::string> signal_set(const soup& s);

}  // namespace icleda
