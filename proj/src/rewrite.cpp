#include "icleda/rewrite.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace icleda {

mol_count mol_count::plus(const mol_count& o) const {
  if (unbounded_ || o.unbounded_) return unbounded();
  return finite(value_ + o.value_);
}

mol_count mol_count::consume_one() const {
  if (unbounded_) return unbounded();
  if (value_ == 0) throw std::logic_error("consuming from an empty count");
  return finite(value_ - 1);
}

void soup::add(const species& sp, mol_count n) { add(render(sp), sp, n); }

void soup::add(const std::string& key, const species& sp, mol_count n) {
  if (!n.is_unbounded() && n.value() == 0) return;
  auto it = items_.find(key);
  if (it == items_.end())
    items_.emplace(key, std::make_pair(sp, n));
  else
    it->second.second = it->second.second.plus(n);
}

void soup::consume_one(const std::string& key) {
  auto it = items_.find(key);
  if (it == items_.end()) throw std::logic_error("consuming absent species " + key);
  mol_count left = it->second.second.consume_one();
  if (!left.is_unbounded() && left.value() == 0)
    items_.erase(it);
  else
    it->second.second = left;
}

mol_count soup::count_of(const std::string& key) const {
  auto it = items_.find(key);
  return it == items_.end() ? mol_count::finite(0) : it->second.second;
}

int rule_equation(rule_tag t) {
  switch (t) {
    case rule_tag::hybridize: return 1;
    case rule_tag::amplify: return 3;
    case rule_tag::block: return 4;
    case rule_tag::unblock: return 7;
    case rule_tag::unblock2: return 8;
    case rule_tag::displace: return 9;
  }
  return 0;
}

std::string rule_name(rule_tag t) {
  switch (t) {
    case rule_tag::hybridize: return "hybridize";
    case rule_tag::amplify: return "amplify";
    case rule_tag::block: return "block";
    case rule_tag::unblock: return "unblock";
    case rule_tag::unblock2: return "unblock2";
    case rule_tag::displace: return "displace";
  }
  return "?";
}

std::string format_trace_entry(const trace_entry& e) {
  std::ostringstream os;
  os << "step " << e.step << ": " << rule_name(e.tag) << "(" << rule_equation(e.tag) << "): ";
  for (std::size_t i = 0; i < e.reactants.size(); ++i) {
    if (i) os << " + ";
    os << e.reactants[i];
  }
  os << " -> ";
  for (std::size_t i = 0; i < e.products.size(); ++i) {
    if (i) os << " + ";
    os << e.products[i];
  }
  os << " [apartness=" << e.apartness << "]";
  return os.str();
}

namespace {

bool all_unbounded(const soup& s, const std::vector<std::string>& keys) {
  for (const auto& k : keys)
    if (!s.count_of(k).is_unbounded()) return false;
  return true;
}

// An instance is listed only if applying it changes the soup. Consuming a
// finite count always changes it; otherwise some product must not already
// sit at unbounded count.
bool would_change(const soup& s, const std::vector<std::string>& consumed,
                  const std::vector<std::pair<species, mol_count>>& produced) {
  if (!all_unbounded(s, consumed) && !consumed.empty()) return true;
  for (const auto& [sp, n] : produced) {
    (void)n;
    if (!s.count_of(render(sp)).is_unbounded()) return true;
  }
  return false;
}

mol_count product_count(const soup& s, const std::vector<std::string>& consumed) {
  // the limiting reagent: one unit per application unless every consumed
  // pool is unbounded, in which case the products are unbounded too
  if (!consumed.empty() && all_unbounded(s, consumed)) return mol_count::unbounded();
  return mol_count::finite(1);
}

void finish_instance(const soup& s, rule_instance& inst, std::vector<rule_instance>& out) {
  if (!would_change(s, inst.consumed, inst.produced)) return;
  std::ostringstream key;
  key << static_cast<int>(inst.tag) << "|";
  for (const auto& r : inst.reactant_display) key << r << "+";
  key << ">";
  for (const auto& p : inst.product_display) key << p << "+";
  inst.sort_key = key.str();
  out.push_back(std::move(inst));
}

// --- displacement helpers ---------------------------------------------------

// Children of each component (part index + 1) within a complex.
std::vector<std::vector<std::size_t>> children_of(const complex& c) {
  std::vector<std::vector<std::size_t>> ch(c.component_count());
  for (std::size_t k = 0; k < c.parts.size(); ++k) ch[c.parts[k].target_comp].push_back(k + 1);
  return ch;
}

// Builds the species formed by the components in `group` (old component
// ids). `root` must be in the group and bond-free within it.
species build_group(const complex& c, const std::vector<std::size_t>& group, std::size_t root) {
  std::vector<std::size_t> new_id(c.component_count(), SIZE_MAX);
  std::vector<std::size_t> order{root};
  new_id[root] = 0;
  // keep original relative order for the rest
  for (std::size_t comp : group)
    if (comp != root) {
      new_id[comp] = order.size();
      order.push_back(comp);
    }

  const bool root_is_loop = root == 0 && c.base_is_loop();
  complex out;
  if (root == 0)
    out.base = c.base;
  else
    out.base = c.parts[root - 1].body;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const attachment& a = c.parts[order[i] - 1];
    attachment na = a;
    na.target_comp = new_id[a.target_comp];
    out.parts.push_back(std::move(na));
  }
  for (const auto& [comp, pos] : c.sealed)
    if (new_id[comp] != SIZE_MAX) out.sealed.emplace_back(new_id[comp], pos);

  if (out.parts.empty()) {
    // a lone sealed strand would mask a synthesized duplex; unreachable
    if (!out.sealed.empty()) throw std::logic_error("sealed component left unbound");
    if (root_is_loop) return std::get<loop_complex>(out.base);
    return std::get<strand>(out.base);
  }
  out.normalize();
  return out;
}

std::vector<std::size_t> collect_subtree(const std::vector<std::vector<std::size_t>>& ch,
                                         std::size_t root,
                                         const std::vector<bool>& cut_child) {
  std::vector<std::size_t> group;
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    std::size_t comp = stack.back();
    stack.pop_back();
    group.push_back(comp);
    for (std::size_t child : ch[comp])
      if (!cut_child[child]) stack.push_back(child);
  }
  std::sort(group.begin(), group.end());
  return group;
}

}  // namespace

std::vector<rule_instance> enumerate_rules(const soup& s) {
  std::vector<rule_instance> out;

  for (const auto& [key, entry] : s.items()) {
    const species& sp = entry.first;

    // amplify: a bare loop continuously emits its product
    if (const auto* loop = std::get_if<loop_complex>(&sp)) {
      strand prod = loop->product();
      rule_instance inst;
      inst.tag = rule_tag::amplify;
      inst.produced.emplace_back(prod, mol_count::unbounded());
      inst.reactant_display = {key};
      inst.product_display = {key, render(prod)};
      inst.apartness = 0;
      finish_instance(s, inst, out);

      // block: any free strand with the free complement of a loop site
      for (const auto& [skey, sentry] : s.items()) {
        const auto* str = std::get_if<strand>(&sentry.first);
        if (!str) continue;
        for (std::size_t pl = 0; pl < loop->domains.size(); ++pl) {
          if (!loop->domains[pl].sensitive()) continue;
          const domain want = loop->domains[pl].complement();
          for (std::size_t ps = 0; ps < str->domains.size(); ++ps) {
            if (str->domains[ps] != want) continue;
            complex blocked;
            blocked.base = *loop;
            blocked.parts.push_back(attachment{*str, ps, 0, pl});
            blocked.normalize();
            rule_instance inst2;
            inst2.tag = rule_tag::block;
            inst2.consumed = {key, skey};
            inst2.produced.emplace_back(blocked, product_count(s, inst2.consumed));
            inst2.reactant_display = {key, skey};
            inst2.product_display = {render(blocked)};
            inst2.apartness = apartness_at(sp, 0, pl) + apartness_at(sentry.first, 0, ps);
            finish_instance(s, inst2, out);
          }
        }
      }
      continue;
    }

    // hybridize: free strand pairs form inert duplexes
    if (const auto* m = std::get_if<strand>(&sp)) {
      for (auto it2 = s.items().find(key); it2 != s.items().end(); ++it2) {
        const auto* n = std::get_if<strand>(&it2->second.first);
        if (!n) continue;
        const bool self = it2->first == key;
        if (self && !entry.second.is_unbounded() && entry.second.value() < 2) continue;
        for (std::size_t pm = 0; pm < m->domains.size(); ++pm) {
          if (!m->domains[pm].sensitive()) continue;
          const domain want = m->domains[pm].complement();
          for (std::size_t pn = 0; pn < n->domains.size(); ++pn) {
            if (n->domains[pn] != want) continue;
            complex duplex;
            duplex.base = *m;
            duplex.parts.push_back(attachment{*n, pn, 0, pm});
            duplex.normalize();
            rule_instance inst;
            inst.tag = rule_tag::hybridize;
            inst.consumed = {key, it2->first};
            inst.produced.emplace_back(duplex, product_count(s, inst.consumed));
            inst.reactant_display = {key, it2->first};
            inst.product_display = {render(duplex)};
            inst.apartness =
                apartness_at(sp, 0, pm) + apartness_at(it2->second.first, 0, pn);
            finish_instance(s, inst, out);
          }
        }
      }
      continue;
    }

    // displacement family: a signal strand removes a bound strand whose
    // remaining bonds all sit beyond the freshly bound position
    const auto& cx = std::get<complex>(sp);
    const auto ch = children_of(cx);
    for (std::size_t k = 0; k < cx.parts.size(); ++k) {
      const attachment& part = cx.parts[k];
      const std::size_t comp = k + 1;
      for (std::size_t p = 0; p < part.body.domains.size(); ++p) {
        const domain& d = part.body.domains[p];
        if (!d.sensitive() || cx.occupied(comp, p)) continue;
        if (part.own_pos <= p) continue;  // extension cannot reach back toward the head
        bool upstream_child = false;
        for (std::size_t child : ch[comp])
          if (cx.parts[child - 1].target_pos <= p) upstream_child = true;
        if (upstream_child) continue;  // bonds before the site survive; the strand stays
        const domain sig = d.complement();
        for (const auto& [akey, aentry] : s.items()) {
          const auto* act = std::get_if<strand>(&aentry.first);
          if (!act || !realizes(*act, sig)) continue;

          // split: the removed part plus the activator become sealed waste,
          // children bonded beyond the site float free with their subtrees
          std::vector<bool> cut(cx.component_count() + 1, false);
          std::vector<std::size_t> freed_roots;
          for (std::size_t child : ch[comp])
            if (cx.parts[child - 1].target_pos > p) {
              cut[child] = true;
              freed_roots.push_back(child);
            }
          cut[comp] = true;  // detached from its own target

          rule_instance inst;
          inst.tag = part.target_comp == 0 && cx.base_is_loop()
                         ? (ch[0].size() >= 2 ? rule_tag::unblock2 : rule_tag::unblock)
                         : rule_tag::displace;
          inst.consumed = {key, akey};
          inst.reactant_display = {key, akey};
          const mol_count pc = product_count(s, inst.consumed);

          std::vector<std::size_t> remainder_group = collect_subtree(ch, 0, cut);
          species remainder = build_group(cx, remainder_group, 0);

          complex waste;
          {
            std::vector<bool> keep_cut(cx.component_count() + 1, false);
            for (std::size_t child : freed_roots) keep_cut[child] = true;
            std::vector<std::size_t> waste_group = collect_subtree(ch, comp, keep_cut);
            species w = build_group(cx, waste_group, comp);
            if (auto* wc = std::get_if<complex>(&w))
              waste = std::move(*wc);
            else
              waste.base = std::get<strand>(w);
            // extension seals every sensitive site beyond the bound position
            for (std::size_t q = p + 1; q < part.body.domains.size(); ++q)
              if (part.body.domains[q].sensitive()) {
                bool already = false;
                for (const auto& [sc, sq] : waste.sealed)
                  if (sc == 0 && sq == q) already = true;
                if (!already) waste.sealed.emplace_back(0, q);
              }
            waste.parts.push_back(attachment{*act, *act->first_sensitive(), 0, p});
            waste.normalize();
          }

          inst.produced.emplace_back(remainder, pc);
          inst.produced.emplace_back(waste, pc);
          inst.product_display = {render(remainder), render(waste)};
          for (std::size_t child : freed_roots) {
            std::vector<bool> none(cx.component_count() + 1, false);
            species freed = build_group(cx, collect_subtree(ch, child, none), child);
            inst.produced.emplace_back(freed, pc);
            inst.product_display.push_back(render(freed));
          }
          inst.apartness = apartness_at(sp, comp, p) +
                           apartness_at(aentry.first, 0, *act->first_sensitive());
          finish_instance(s, inst, out);
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const rule_instance& a, const rule_instance& b) {
    if (a.apartness != b.apartness) return a.apartness < b.apartness;
    if (a.tag != b.tag) return static_cast<int>(a.tag) < static_cast<int>(b.tag);
    return a.sort_key < b.sort_key;
  });
  return out;
}

void apply_rule(soup& s, const rule_instance& inst) {
  for (const auto& k : inst.consumed) s.consume_one(k);
  for (const auto& [sp, n] : inst.produced) s.add(sp, n);
}

scheduler deterministic_scheduler() {
  return [](const std::vector<rule_instance>&) -> std::size_t { return 0; };
}

scheduler random_scheduler(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](const std::vector<rule_instance>& instances) -> std::size_t {
    std::uniform_int_distribution<std::size_t> pick(0, instances.size() - 1);
    return pick(*rng);
  };
}

std::optional<trace_entry> step(soup& s) {
  auto instances = enumerate_rules(s);
  if (instances.empty()) return std::nullopt;
  const rule_instance& inst = instances.front();
  trace_entry e;
  e.tag = inst.tag;
  e.reactants = inst.reactant_display;
  e.products = inst.product_display;
  e.apartness = inst.apartness;
  apply_rule(s, inst);
  return e;
}

fixpoint_result run_to_fixpoint(soup s, const run_options& opts) {
  if (opts.step_limit < 1) throw std::invalid_argument("step limit must be >= 1");
  const scheduler choose = opts.choose ? opts.choose : deterministic_scheduler();
  fixpoint_result res;
  for (;;) {
    auto instances = enumerate_rules(s);
    if (instances.empty()) {
      res.reason = termination::fixpoint;
      break;
    }
    if (res.steps >= opts.step_limit) {
      res.reason = termination::step_limit;
      break;
    }
    const rule_instance& inst = instances[choose(instances) % instances.size()];
    trace_entry e;
    e.step = res.steps + 1;
    e.tag = inst.tag;
    e.reactants = inst.reactant_display;
    e.products = inst.product_display;
    e.apartness = inst.apartness;
    apply_rule(s, inst);
    ++res.steps;
    if (opts.observer) opts.observer(s, e);
    if (opts.record_trace) res.trace.push_back(std::move(e));
  }
  res.signals = signal_set(s);
  res.final_soup = std::move(s);
  return res;
}

std::set<std::string> signal_set(const soup& s) {
  std::set<std::string> out;
  for (const auto& [key, entry] : s.items()) {
    (void)key;
    if (const auto* str = std::get_if<strand>(&entry.first))
      if (auto sig = realized_signal(*str)) out.insert(render(*sig));
  }
  return out;
}

}  // namespace icleda
