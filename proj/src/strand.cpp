#include "icleda/strand.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cstring>
#include <numeric>
#include <sstream>

namespace icleda {

namespace {

bool name_sensitive(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

void check_name(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("empty domain name");
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_')
    throw std::invalid_argument("domain name must start with a letter: " + name);
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw std::invalid_argument("bad character in domain name: " + name);
}

std::string lower_copy(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

domain::domain(std::string n, bool p) : name(std::move(n)), primed(p) { check_name(name); }

bool domain::sensitive() const { return name_sensitive(name); }

domain dom(const std::string& spec) {
  if (!spec.empty() && spec.back() == '*') return domain(spec.substr(0, spec.size() - 1), true);
  return domain(spec, false);
}

strand::strand(std::vector<domain> ds) : domains(std::move(ds)) {
  if (domains.empty()) throw std::invalid_argument("empty strand");
}

strand strand::complement() const {
  std::vector<domain> out;
  out.reserve(domains.size());
  for (const auto& d : domains) out.push_back(d.complement());
  return strand(std::move(out));
}

std::optional<std::size_t> strand::first_sensitive() const {
  for (std::size_t i = 0; i < domains.size(); ++i)
    if (domains[i].sensitive()) return i;
  return std::nullopt;
}

loop_complex::loop_complex(std::vector<domain> ds) : domains(std::move(ds)) {
  if (domains.empty()) throw std::invalid_argument("empty loop");
  if (std::none_of(domains.begin(), domains.end(), [](const domain& d) { return d.sensitive(); }))
    throw std::invalid_argument("loop needs at least one sensitive domain");
}

strand loop_complex::product() const {
  std::vector<domain> out;
  out.reserve(domains.size());
  for (auto it = domains.rbegin(); it != domains.rend(); ++it) out.push_back(it->complement());
  return strand(std::move(out));
}

std::optional<domain> loop_complex::output_signal() const {
  for (auto it = domains.rbegin(); it != domains.rend(); ++it)
    if (it->sensitive()) return it->complement();
  return std::nullopt;
}

const std::vector<domain>& complex::component_domains(std::size_t comp) const {
  if (comp == 0) {
    if (base_is_loop()) return std::get<loop_complex>(base).domains;
    return std::get<strand>(base).domains;
  }
  return parts.at(comp - 1).body.domains;
}

bool complex::occupied(std::size_t comp, std::size_t pos) const {
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].target_comp == comp && parts[k].target_pos == pos) return true;
    if (k + 1 == comp && parts[k].own_pos == pos) return true;
  }
  for (const auto& [c, p] : sealed)
    if (c == comp && p == pos) return true;
  return false;
}

void complex::validate() const {
  if (parts.empty()) throw std::invalid_argument("complex without bound strands");
  std::vector<std::pair<std::size_t, std::size_t>> used = sealed;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const attachment& a = parts[k];
    if (a.target_comp > k)
      throw std::invalid_argument("attachment targets a later component");
    const auto& tds = component_domains(a.target_comp);
    if (a.target_pos >= tds.size() || a.own_pos >= a.body.domains.size())
      throw std::invalid_argument("bond position out of range");
    const domain& td = tds[a.target_pos];
    const domain& od = a.body.domains[a.own_pos];
    if (!td.sensitive() || od != td.complement())
      throw std::invalid_argument("bond does not pair exact sensitive complements: " +
                                  render(td) + " vs " + render(od));
    used.emplace_back(a.target_comp, a.target_pos);
    used.emplace_back(k + 1, a.own_pos);
  }
  std::sort(used.begin(), used.end());
  if (std::adjacent_find(used.begin(), used.end()) != used.end())
    throw std::invalid_argument("domain position bound twice");
}

void complex::normalize() {
  const std::size_t n = parts.size();
  if (n < 2) return;
  std::vector<std::string> body_keys(n);
  for (std::size_t k = 0; k < n; ++k) body_keys[k] = render(parts[k].body);

  std::vector<std::size_t> order;          // old part indices in new order
  std::vector<std::size_t> new_comp(n + 1, 0);  // old component -> new component
  std::vector<bool> placed(n, false);
  while (order.size() < n) {
    std::size_t best = n;
    auto key_of = [&](std::size_t k) {
      return std::make_tuple(new_comp[parts[k].target_comp], parts[k].target_pos,
                             body_keys[k], parts[k].own_pos);
    };
    for (std::size_t k = 0; k < n; ++k) {
      if (placed[k]) continue;
      // eligible once its target is the base or an already-placed part
      if (parts[k].target_comp != 0 && !placed[parts[k].target_comp - 1]) continue;
      if (best == n || key_of(k) < key_of(best)) best = k;
    }
    if (best == n) throw std::invalid_argument("attachment cycle");
    placed[best] = true;
    order.push_back(best);
    new_comp[best + 1] = order.size();
  }

  std::vector<attachment> np;
  np.reserve(n);
  for (std::size_t k : order) {
    attachment a = parts[k];
    a.target_comp = new_comp[a.target_comp];
    np.push_back(std::move(a));
  }
  std::vector<std::pair<std::size_t, std::size_t>> ns;
  ns.reserve(sealed.size());
  for (const auto& [c, p] : sealed) ns.emplace_back(new_comp[c], p);
  std::sort(ns.begin(), ns.end());
  parts = std::move(np);
  sealed = std::move(ns);
}

// ---------------------------------------------------------------------------
// walk: flattened reading order of a species, used by apartness and matching

namespace {

struct walk_item {
  domain d;
  std::size_t comp;
  std::size_t pos;
};

struct walk_view {
  std::vector<walk_item> items;
  std::size_t diamond = 0;  // index of the first domain after the head marker
};

walk_view walk_of(const species& sp) {
  walk_view w;
  if (const auto* s = std::get_if<strand>(&sp)) {
    for (std::size_t i = 0; i < s->domains.size(); ++i) w.items.push_back({s->domains[i], 0, i});
    return w;
  }
  if (const auto* l = std::get_if<loop_complex>(&sp)) {
    for (std::size_t i = 0; i < l->domains.size(); ++i) w.items.push_back({l->domains[i], 0, i});
    return w;
  }
  const auto& c = std::get<complex>(sp);
  const auto& base_ds = c.component_domains(0);
  for (std::size_t i = 0; i < base_ds.size(); ++i) w.items.push_back({base_ds[i], 0, i});
  // a loop base has no head; the complex's diamond is the first bound strand's
  w.diamond = c.base_is_loop() ? base_ds.size() : 0;
  for (std::size_t k = 0; k < c.parts.size(); ++k) {
    const auto& ds = c.parts[k].body.domains;
    for (std::size_t i = 0; i < ds.size(); ++i) w.items.push_back({ds[i], k + 1, i});
  }
  return w;
}

bool species_occupied(const species& sp, std::size_t comp, std::size_t pos) {
  if (const auto* c = std::get_if<complex>(&sp)) return c->occupied(comp, pos);
  return false;
}

std::size_t count_sensitive_between(const walk_view& w, std::size_t idx) {
  std::size_t lo, hi;  // count sensitive items in [lo, hi)
  if (idx >= w.diamond) {
    lo = w.diamond;
    hi = idx;
  } else {
    lo = idx + 1;
    hi = w.diamond;
  }
  std::size_t n = 0;
  for (std::size_t i = lo; i < hi; ++i)
    if (w.items[i].d.sensitive()) ++n;
  return n;
}

}  // namespace

std::optional<hybridization_site> can_hybridize(const species& m, const species& n) {
  const walk_view wm = walk_of(m);
  const walk_view wn = walk_of(n);
  for (std::size_t i = 0; i < wm.items.size(); ++i) {
    const auto& it = wm.items[i];
    if (!it.d.sensitive() || species_occupied(m, it.comp, it.pos)) continue;
    const domain want = it.d.complement();
    for (std::size_t j = 0; j < wn.items.size(); ++j) {
      const auto& jt = wn.items[j];
      if (jt.d == want && !species_occupied(n, jt.comp, jt.pos))
        return hybridization_site{it.d, i, j};
    }
  }
  return std::nullopt;
}

std::size_t apartness(const domain& x, const species& m) {
  const walk_view w = walk_of(m);
  std::size_t found = w.items.size();
  for (std::size_t i = w.diamond; i < w.items.size(); ++i)
    if (w.items[i].d == x) {
      found = i;
      break;
    }
  if (found == w.items.size())
    for (std::size_t i = 0; i < w.diamond; ++i)
      if (w.items[i].d == x) {
        found = i;
        break;
      }
  if (found == w.items.size())
    throw std::invalid_argument("apartness: domain " + render(x) + " absent from species");
  return count_sensitive_between(w, found);
}

std::size_t joint_apartness(const domain& x, const species& m, const species& n) {
  return apartness(x, m) + apartness(x.complement(), n);
}

std::size_t apartness_at(const species& m, std::size_t comp, std::size_t pos) {
  const walk_view w = walk_of(m);
  for (std::size_t i = 0; i < w.items.size(); ++i)
    if (w.items[i].comp == comp && w.items[i].pos == pos) return count_sensitive_between(w, i);
  throw std::invalid_argument("apartness_at: no such position");
}

bool realizes(const strand& s, const domain& sig) {
  auto i = s.first_sensitive();
  return i && s.domains[*i] == sig;
}

std::optional<domain> realized_signal(const strand& s) {
  auto i = s.first_sensitive();
  if (!i) return std::nullopt;
  return s.domains[*i];
}

strand realize_signal(const signal& sig, signal_flavor flavor, std::optional<domain> extended_site) {
  const std::string stem = lower_copy(sig.name.name) + (sig.name.primed ? "p" : "");
  std::vector<domain> ds{sig.name, domain(stem + "x", false)};
  if (flavor == signal_flavor::extended_form) {
    if (!extended_site)
      throw std::invalid_argument("extended realization needs the trigger site domain");
    ds.push_back(extended_site->complement());
    ds.push_back(domain(stem + "z", false));
  }
  return strand(std::move(ds));
}

// ---------------------------------------------------------------------------
// rendering

std::string render(const domain& d) { return d.primed ? d.name + "*" : d.name; }

namespace {

std::string render_domains(const std::vector<domain>& ds, const complex* ctx, std::size_t comp) {
  std::string out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) out += ' ';
    out += render(ds[i]);
    if (ctx != nullptr)
      for (const auto& [c, p] : ctx->sealed)
        if (c == comp && p == i) out += '!';
  }
  return out;
}

// 1-based index of `pos` among the occurrences of its domain across
// components 0..upto (inclusive), plus the total occurrence count.
std::pair<std::size_t, std::size_t> occurrence_index(const complex& c, std::size_t upto,
                                                     std::size_t comp, std::size_t pos) {
  const domain& d = c.component_domains(comp)[pos];
  std::size_t index = 0, total = 0;
  for (std::size_t k = 0; k <= upto; ++k) {
    const auto& ds = c.component_domains(k);
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (ds[i] == d) {
        ++total;
        if (k == comp && i == pos) index = total;
      }
  }
  return {index, total};
}

// first occurrence of `d` in `body` that is not sealed in component `comp`
std::size_t first_free_occurrence(const std::vector<domain>& body, const domain& d,
                                  const complex& c, std::size_t comp) {
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != d) continue;
    bool is_sealed = false;
    for (const auto& [sc, sp] : c.sealed)
      if (sc == comp && sp == i) is_sealed = true;
    if (!is_sealed) return i;
  }
  return body.size();
}

}  // namespace

std::string render(const strand& s) { return "^" + render_domains(s.domains, nullptr, 0); }

std::string render(const loop_complex& l) {
  return "<" + render_domains(l.domains, nullptr, 0) + ">";
}

std::string render(const complex& c) {
  std::string out = c.base_is_loop()
                        ? "<" + render_domains(c.component_domains(0), &c, 0) + ">"
                        : "^" + render_domains(c.component_domains(0), &c, 0);
  for (std::size_t k = 0; k < c.parts.size(); ++k) {
    const attachment& a = c.parts[k];
    std::string site = render(c.component_domains(a.target_comp)[a.target_pos]);
    auto [idx, total] = occurrence_index(c, k, a.target_comp, a.target_pos);
    if (total > 1) site += "#" + std::to_string(idx);
    std::string body = render_domains(a.body.domains, &c, k + 1);
    const domain bonded = a.body.domains[a.own_pos];
    if (first_free_occurrence(a.body.domains, bonded, c, k + 1) != a.own_pos) {
      std::size_t nth = 0;
      for (std::size_t i = 0; i <= a.own_pos; ++i)
        if (a.body.domains[i] == bonded) ++nth;
      site += "~" + std::to_string(nth);
    }
    out = "[" + out + " | ^" + body + " @" + site + "]";
  }
  return out;
}

std::string render(const species& sp) {
  return std::visit([](const auto& v) { return render(v); }, sp);
}

bool operator==(const species& a, const species& b) { return render(a) == render(b); }

// ---------------------------------------------------------------------------
// parsing

namespace {

struct species_parser {
  const std::string& text;
  std::size_t pos = 0;
  std::vector<std::size_t> pending_base_seals;  // seals parsed on a bare loop/strand

  explicit species_parser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("species parse error: " + msg + " in \"" + text + "\" at offset " +
                                std::to_string(pos));
  }

  void skip_ws() {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }
  bool at(char c) const { return pos < text.size() && text[pos] == c; }
  void expect(char c) {
    if (!at(c)) fail(std::string("expected '") + c + "'");
    ++pos;
  }

  // one domain token with optional '*' and '!'
  std::pair<domain, bool> parse_domain_token() {
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected domain name");
    std::string name = text.substr(start, pos - start);
    bool primed = false, is_sealed = false;
    if (at('*')) {
      primed = true;
      ++pos;
    }
    if (at('!')) {
      is_sealed = true;
      ++pos;
    }
    return {domain(name, primed), is_sealed};
  }

  // domain sequence until a closing character; returns sealed positions
  std::vector<domain> parse_body(std::vector<std::size_t>& seals, const char* stops) {
    std::vector<domain> ds;
    for (;;) {
      skip_ws();
      if (pos >= text.size()) break;
      if (std::strchr(stops, text[pos]) != nullptr) break;
      auto [d, s] = parse_domain_token();
      if (s) seals.push_back(ds.size());
      ds.push_back(std::move(d));
    }
    return ds;
  }

  complex wrap_base(species sp) {
    complex c;
    if (auto* cc = std::get_if<complex>(&sp)) return std::move(*cc);
    if (auto* l = std::get_if<loop_complex>(&sp))
      c.base = std::move(*l);
    else
      c.base = std::move(std::get<strand>(sp));
    for (std::size_t s : pending_base_seals) c.sealed.emplace_back(0, s);
    pending_base_seals.clear();
    return c;
  }

  species parse_species_inner() {
    skip_ws();
    if (at('<')) {
      ++pos;
      std::vector<std::size_t> seals;
      auto ds = parse_body(seals, ">");
      expect('>');
      pending_base_seals = std::move(seals);
      return loop_complex(std::move(ds));
    }
    if (at('[')) {
      ++pos;
      species inner = parse_species_inner();
      skip_ws();
      expect('|');
      complex c = wrap_base(std::move(inner));
      // seals parsed so far belong to existing components; new strand next
      skip_ws();
      bool head_left = at('^');
      if (head_left) ++pos;
      std::vector<std::size_t> seals;
      auto ds = parse_body(seals, "@^");
      if (at('^')) {  // head marker on the right: written order is reversed
        ++pos;
        std::reverse(ds.begin(), ds.end());
        for (auto& s : seals) s = ds.size() - 1 - s;
        skip_ws();
      } else if (!head_left) {
        fail("strand needs a head marker");
      }
      expect('@');
      auto [site_dom, site_sealed] = parse_domain_token();
      if (site_sealed) fail("seal marker on a bond site");
      std::size_t occurrence = 0, own_occurrence = 0;
      if (at('#')) {
        ++pos;
        occurrence = parse_number();
      }
      if (at('~')) {
        ++pos;
        own_occurrence = parse_number();
      }
      skip_ws();
      expect(']');
      attach(c, strand(std::move(ds)), seals, site_dom, occurrence, own_occurrence);
      return c;
    }
    // plain strand
    bool head_left = at('^');
    if (head_left) ++pos;
    std::vector<std::size_t> seals;
    auto ds = parse_body(seals, "^");
    if (!head_left) {
      expect('^');
      std::reverse(ds.begin(), ds.end());
      for (auto& s : seals) s = ds.size() - 1 - s;
    }
    pending_base_seals = std::move(seals);
    return strand(std::move(ds));
  }

  std::size_t parse_number() {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected a number");
    return static_cast<std::size_t>(std::stoul(text.substr(start, pos - start)));
  }

  void attach(complex& c, strand body, const std::vector<std::size_t>& seals,
              const domain& site_dom, std::size_t occurrence, std::size_t own_occurrence) {
    // resolve the bond site among all occurrences of site_dom in the complex
    std::vector<std::pair<std::size_t, std::size_t>> hits;
    for (std::size_t k = 0; k < c.component_count(); ++k) {
      const auto& ds = c.component_domains(k);
      for (std::size_t i = 0; i < ds.size(); ++i)
        if (ds[i] == site_dom) hits.emplace_back(k, i);
    }
    if (hits.empty()) fail("bond site " + render(site_dom) + " not found");
    if (occurrence == 0 && hits.size() > 1)
      fail("ambiguous bond site " + render(site_dom));
    if (occurrence > hits.size()) fail("bond site occurrence out of range");
    auto [tc, tp] = hits[occurrence == 0 ? 0 : occurrence - 1];

    const domain own = site_dom.complement();
    std::size_t op = body.domains.size();
    if (own_occurrence == 0) {
      for (std::size_t i = 0; i < body.domains.size(); ++i) {
        if (body.domains[i] != own) continue;
        if (std::find(seals.begin(), seals.end(), i) != seals.end()) continue;
        op = i;
        break;
      }
    } else {
      std::size_t nth = 0;
      for (std::size_t i = 0; i < body.domains.size(); ++i)
        if (body.domains[i] == own && ++nth == own_occurrence) {
          op = i;
          break;
        }
    }
    if (op == body.domains.size())
      fail("bound strand lacks a free " + render(own));

    const std::size_t comp = c.parts.size() + 1;
    for (std::size_t s : seals) c.sealed.emplace_back(comp, s);
    c.parts.push_back(attachment{std::move(body), op, tc, tp});
  }
};

}  // namespace

species parse_species(const std::string& text) {
  species_parser p(text);
  species sp = p.parse_species_inner();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  if (!p.pending_base_seals.empty()) p.fail("seal marker outside a complex");
  if (auto* c = std::get_if<complex>(&sp)) {
    c->validate();
    c->normalize();
  }
  return sp;
}

strand parse_strand(const std::string& text) {
  species sp = parse_species(text);
  if (auto* s = std::get_if<strand>(&sp)) return *s;
  throw std::invalid_argument("not a strand: " + text);
}

}  // namespace icleda
