/// Molecular word model: oriented strands over sensitive/neutral domains,
/// circular loop templates, stacked hybridization complexes, signal
/// realizations and the apartness metric that drives reaction priority.
///
/// Conventions:
///  - A domain name starting with an upper-case letter is sensitive, one
///    starting with a lower-case letter (or '_') is neutral. Complementation
///    flips only the primed flag; neutral domains never hybridize.
///  - Strands are stored in reading order, head (3' end) first. In that
///    representation the Watson-Crick complement of a strand is the
///    element-wise complement of its domains: the customary "reverse and
///    prime" applies to the written form, whose writing direction flips
///    together with the head marker.
///  - A loop template is a fixed linearization of the circular molecule;
///    the covalent link closes it between the last and first domain, so
///    loop equality is exact sequence equality, not rotation equality.
///
/// Canonical text rendering (used for species identity, traces and the
/// netlist file):
///   domain   NAME, primed with a trailing '*', sealed occurrences get '!'
///   strand   '^' then domains in reading order: ^t1 S1* F1 w1
///            (the parser also accepts the head marker at the right end,
///             in which case the written order is reversed)
///   loop     <F1* u1 R1*>
///   complex  [inner | strand @Site], nested left; @Site names the bound
///            domain on the inner species, '#k' disambiguates repeats.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace icleda {

struct domain {
  std::string name;
  bool primed = false;

  domain() = default;
  domain(std::string n, bool p);

  bool sensitive() const;
  domain complement() const { return domain(name, !primed); }

  bool operator==(const domain& o) const { return name == o.name && primed == o.primed; }
  bool operator!=(const domain& o) const { return !(*this == o); }
};

/// Shorthand constructors; "A*" makes a primed domain.
domain dom(const std::string& spec);

/// Linear oriented strand; domains run from the head (3' end) outward.
struct strand {
  std::vector<domain> domains;

  strand() = default;
  explicit strand(std::vector<domain> ds);

  strand complement() const;

  /// Index of the first sensitive domain from the head, if any.
  std::optional<std::size_t> first_sensitive() const;

  bool operator==(const strand& o) const { return domains == o.domains; }
};

/// Circular amplification template written as its fixed linearization.
struct loop_complex {
  std::vector<domain> domains;

  loop_complex() = default;
  explicit loop_complex(std::vector<domain> ds);

  /// The linear amplification product: element-wise complement of the
  /// template read backwards, so its head-first order starts at the
  /// complement of the template's last domain. A template <F* u R*>
  /// yields ^R u* F, which realizes the signal R.
  strand product() const;

  /// Name of the signal the product realizes (complement of the last
  /// sensitive template domain).
  std::optional<domain> output_signal() const;

  bool operator==(const loop_complex& o) const { return domains == o.domains; }
};

/// One strand stacked onto an existing component of a complex.
/// Components are numbered 0 (the base) then 1..n in attachment order;
/// an attachment may only target a lower-numbered component.
struct attachment {
  strand body;
  std::size_t own_pos = 0;     // bonded domain position within body
  std::size_t target_comp = 0; // 0 = base, k >= 1 = attachment k-1
  std::size_t target_pos = 0;  // bonded domain position within the target
};

/// Stacked hybridization complex: a base species plus a tree of bound
/// strands. Every bond pairs a domain with its exact complement and each
/// domain position carries at most one bond. `sealed` marks positions
/// paired by primer extension rather than by a free partner; they count
/// as occupied forever.
struct complex {
  std::variant<loop_complex, strand> base;
  std::vector<attachment> parts;
  std::vector<std::pair<std::size_t, std::size_t>> sealed;  // (component, position)

  bool base_is_loop() const { return std::holds_alternative<loop_complex>(base); }
  const std::vector<domain>& component_domains(std::size_t comp) const;
  std::size_t component_count() const { return parts.size() + 1; }

  bool occupied(std::size_t comp, std::size_t pos) const;

  /// Reorders attachments into the canonical topological order
  /// (by target component, target position, then rendering).
  void normalize();

  /// Throws std::invalid_argument on a broken invariant: empty, bonds not
  /// complementary, double occupancy, or a forward-referencing target.
  void validate() const;
};

using species = std::variant<strand, loop_complex, complex>;

std::string render(const domain& d);
std::string render(const strand& s);
std::string render(const loop_complex& l);
std::string render(const complex& c);
std::string render(const species& sp);

/// Inverse of render; accepts the strand head marker at either end.
species parse_species(const std::string& text);
strand parse_strand(const std::string& text);

bool operator==(const species& a, const species& b);

struct hybridization_site {
  domain on_first;          // the matched domain in the first species
  std::size_t first_pos;    // its position (walk order for complexes)
  std::size_t second_pos;   // position of the complement in the second species
};

/// Exact-complement match of sensitive domains between two species:
/// returns the first (in walk order) pair of a free sensitive domain in
/// `m` whose complement is free in `n`; neutral and occupied domains
/// never match.
std::optional<hybridization_site> can_hybridize(const species& m, const species& n);

/// Number of sensitive domains strictly between the head of `m` and the
/// first matching occurrence of `x`. For a complex the walk runs through
/// the base species and then each bound strand in canonical order; the
/// head is the first 3' marker in the walk (for a loop base, the first
/// bound strand's head). Throws std::invalid_argument if `x` is absent.
std::size_t apartness(const domain& x, const species& m);

/// apartness(x, m) + apartness(x', n); throws if either side is absent.
std::size_t joint_apartness(const domain& x, const species& m, const species& n);

/// Position-precise apartness for a known occurrence (component, position);
/// used by the rule engine to rank concrete bond candidates.
std::size_t apartness_at(const species& m, std::size_t comp, std::size_t pos);

struct signal {
  domain name;  // the sensitive domain identifying the signal
};

/// A strand realizes signal A iff its first sensitive domain from the
/// head is A.
bool realizes(const strand& s, const domain& sig);

/// Signal realized by a strand, if any (its first sensitive domain).
std::optional<domain> realized_signal(const strand& s);

enum class signal_flavor { short_form, extended_form };

/// Builds a realization of `sig`: the short form is the head, the signal
/// domain and a fresh neutral tail; the extended form additionally carries
/// the complement of the given site domain plus a neutral lead on the tail
/// side. Tail names derive deterministically from the signal name.
strand realize_signal(const signal& sig, signal_flavor flavor,
                      std::optional<domain> extended_site = std::nullopt);

}  // namespace icleda
