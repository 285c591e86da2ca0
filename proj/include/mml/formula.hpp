#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "mml/errors.hpp"

namespace mml {

enum class Kind {
	var,
	tru,
	fls,
	lnot,
	land,
	lor,
	implies,
	dia,    // <>  diamond along R
	box,    // []  box along R
	exists, // E   diamond along the equivalence
	forall, // A   box along the equivalence
};

/// Immutable formula tree with shared subterms. Equality is structural, no
/// normalization of any kind.
class Formula {
public:
	struct Node;

	Formula() = default;

	Kind kind() const;
	const std::string& var_name() const;
	const Formula& lhs() const;
	const Formula& rhs() const;
	std::size_t hash() const;
	bool valid() const { return node_ != nullptr; }
	const Node* raw() const { return node_.get(); }

	static Formula var(std::string name);
	static Formula tru();
	static Formula fls();
	static Formula lnot(Formula a);
	static Formula land(Formula a, Formula b);
	static Formula lor(Formula a, Formula b);
	static Formula implies(Formula a, Formula b);
	static Formula dia(Formula a);
	static Formula box(Formula a);
	static Formula exists(Formula a);
	static Formula forall(Formula a);

	bool operator==(const Formula& o) const;
	bool operator!=(const Formula& o) const { return !(*this == o); }

private:
	explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
	std::shared_ptr<const Node> node_;
};

struct Formula::Node {
	Kind kind;
	Formula a, b;     // operands; unary ops use a only
	std::string name; // for variables
	std::size_t hash;
};

namespace detail {

inline std::size_t hash_mix(std::size_t h, std::size_t v) {
	return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

inline std::shared_ptr<const Formula::Node> make_node(Kind k, Formula a, Formula b,
                                                      std::string name) {
	std::size_t h = static_cast<std::size_t>(k) * 0x100000001b3ull;
	if (!name.empty()) h = hash_mix(h, std::hash<std::string>{}(name));
	if (a.valid()) h = hash_mix(h, a.hash());
	if (b.valid()) h = hash_mix(h, b.hash());
	auto n = std::make_shared<Formula::Node>();
	n->kind = k;
	n->a = std::move(a);
	n->b = std::move(b);
	n->name = std::move(name);
	n->hash = h;
	return n;
}

} // namespace detail

inline Kind Formula::kind() const { return node_->kind; }
inline const std::string& Formula::var_name() const { return node_->name; }
inline const Formula& Formula::lhs() const { return node_->a; }
inline const Formula& Formula::rhs() const { return node_->b; }
inline std::size_t Formula::hash() const { return node_->hash; }

inline Formula Formula::var(std::string name) {
	return Formula(detail::make_node(Kind::var, {}, {}, std::move(name)));
}
inline Formula Formula::tru() { return Formula(detail::make_node(Kind::tru, {}, {}, {})); }
inline Formula Formula::fls() { return Formula(detail::make_node(Kind::fls, {}, {}, {})); }
inline Formula Formula::lnot(Formula a) {
	return Formula(detail::make_node(Kind::lnot, std::move(a), {}, {}));
}
inline Formula Formula::land(Formula a, Formula b) {
	return Formula(detail::make_node(Kind::land, std::move(a), std::move(b), {}));
}
inline Formula Formula::lor(Formula a, Formula b) {
	return Formula(detail::make_node(Kind::lor, std::move(a), std::move(b), {}));
}
inline Formula Formula::implies(Formula a, Formula b) {
	return Formula(detail::make_node(Kind::implies, std::move(a), std::move(b), {}));
}
inline Formula Formula::dia(Formula a) {
	return Formula(detail::make_node(Kind::dia, std::move(a), {}, {}));
}
inline Formula Formula::box(Formula a) {
	return Formula(detail::make_node(Kind::box, std::move(a), {}, {}));
}
inline Formula Formula::exists(Formula a) {
	return Formula(detail::make_node(Kind::exists, std::move(a), {}, {}));
}
inline Formula Formula::forall(Formula a) {
	return Formula(detail::make_node(Kind::forall, std::move(a), {}, {}));
}

inline bool Formula::operator==(const Formula& o) const {
	if (node_ == o.node_) return true;
	if (!node_ || !o.node_) return false;
	if (node_->hash != o.node_->hash || node_->kind != o.node_->kind) return false;
	if (node_->name != o.node_->name) return false;
	if (node_->a.valid() != o.node_->a.valid()) return false;
	if (node_->a.valid() && !(node_->a == o.node_->a)) return false;
	if (node_->b.valid() != o.node_->b.valid()) return false;
	if (node_->b.valid() && !(node_->b == o.node_->b)) return false;
	return true;
}

struct FormulaHash {
	std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Printing. Concrete syntax: ->  |  &  with unary ~ <> [] E A binding
// tightest; -> is right-associative. Parentheses are emitted exactly where
// the shape requires them, so print and parse are mutually inverse.

namespace detail {

inline int precedence(Kind k) {
	switch (k) {
	case Kind::implies: return 1;
	case Kind::lor: return 2;
	case Kind::land: return 3;
	default: return 4;
	}
}

inline void print_to(const Formula& f, std::string& out, int parent, bool paren_at_equal) {
	int prec = precedence(f.kind());
	// Lower precedence always needs parens; equal precedence needs them in the
	// slot that the operator's associativity does not cover.
	bool need = prec < parent || (prec == parent && paren_at_equal);
	if (need) out += '(';
	switch (f.kind()) {
	case Kind::var: out += f.var_name(); break;
	case Kind::tru: out += "true"; break;
	case Kind::fls: out += "false"; break;
	case Kind::lnot:
		out += '~';
		print_to(f.lhs(), out, 4, false);
		break;
	case Kind::dia:
		out += "<>";
		print_to(f.lhs(), out, 4, false);
		break;
	case Kind::box:
		out += "[]";
		print_to(f.lhs(), out, 4, false);
		break;
	case Kind::exists:
		out += 'E';
		print_to(f.lhs(), out, 4, false);
		break;
	case Kind::forall:
		out += 'A';
		print_to(f.lhs(), out, 4, false);
		break;
	case Kind::land:
		print_to(f.lhs(), out, 3, false);
		out += " & ";
		print_to(f.rhs(), out, 3, true);
		break;
	case Kind::lor:
		print_to(f.lhs(), out, 2, false);
		out += " | ";
		print_to(f.rhs(), out, 2, true);
		break;
	case Kind::implies:
		// Right-associative: a nested -> on the left needs parens.
		print_to(f.lhs(), out, 1, true);
		out += " -> ";
		print_to(f.rhs(), out, 1, false);
		break;
	}
	if (need) out += ')';
}

} // namespace detail

inline std::string to_string(const Formula& f) {
	std::string out;
	detail::print_to(f, out, 0, false);
	return out;
}

// ---------------------------------------------------------------------------
// Subformula set: every distinct subterm, deduplicated structurally, in
// post-order of first appearance (operands before the compound).

class SubformulaSet {
public:
	SubformulaSet() = default;
	explicit SubformulaSet(const Formula& root) { add(root); }

	int size() const { return int(items_.size()); }
	const std::vector<Formula>& items() const { return items_; }
	const Formula& operator[](int i) const { return items_[i]; }

	bool contains(const Formula& f) const { return index_.count(f) != 0; }
	int index_of(const Formula& f) const {
		auto it = index_.find(f);
		return it == index_.end() ? -1 : it->second;
	}

	auto begin() const { return items_.begin(); }
	auto end() const { return items_.end(); }

private:
	void add(const Formula& f) {
		if (index_.count(f)) return;
		if (f.lhs().valid()) add(f.lhs());
		if (f.rhs().valid()) add(f.rhs());
		index_.emplace(f, int(items_.size()));
		items_.push_back(f);
	}

	std::vector<Formula> items_;
	std::unordered_map<Formula, int, FormulaHash> index_;
};

inline SubformulaSet subformulas(const Formula& f) { return SubformulaSet(f); }

/// Variable names occurring in f, sorted, deduplicated.
inline std::vector<std::string> vars(const Formula& f) {
	std::vector<std::string> out;
	for (const Formula& g : subformulas(f))
		if (g.kind() == Kind::var) out.push_back(g.var_name());
	std::sort(out.begin(), out.end());
	out.erase(std::unique(out.begin(), out.end()), out.end());
	return out;
}

// ---------------------------------------------------------------------------
// Splitting translation: [] psi becomes t(psi) & [] t(psi) and <> psi becomes
// t(psi) | <> t(psi); everything else (including E/A) maps homomorphically.
// Validity of the translation on a frame coincides with validity of the
// original on the frame's reflexivization.

inline Formula boxplus_translate(const Formula& f) {
	switch (f.kind()) {
	case Kind::var:
	case Kind::tru:
	case Kind::fls: return f;
	case Kind::lnot: return Formula::lnot(boxplus_translate(f.lhs()));
	case Kind::land:
		return Formula::land(boxplus_translate(f.lhs()), boxplus_translate(f.rhs()));
	case Kind::lor:
		return Formula::lor(boxplus_translate(f.lhs()), boxplus_translate(f.rhs()));
	case Kind::implies:
		return Formula::implies(boxplus_translate(f.lhs()), boxplus_translate(f.rhs()));
	case Kind::dia: {
		Formula t = boxplus_translate(f.lhs());
		return Formula::lor(t, Formula::dia(t));
	}
	case Kind::box: {
		Formula t = boxplus_translate(f.lhs());
		return Formula::land(t, Formula::box(t));
	}
	case Kind::exists: return Formula::exists(boxplus_translate(f.lhs()));
	case Kind::forall: return Formula::forall(boxplus_translate(f.lhs()));
	}
	fail(errc::bad_input, "malformed formula");
}

// ---------------------------------------------------------------------------
// Stock formulas.

/// Bounded-depth axiom over fresh variables p1..pn:
///   bd_1 = <>[]p1 -> p1,   bd_n = <>([]pn & ~bd_{n-1}) -> pn.
inline Formula mk_bd(int n) {
	if (n < 1) fail(errc::bad_input, "bd_n requires n >= 1");
	Formula cur;
	for (int i = 1; i <= n; ++i) {
		Formula p = Formula::var("p" + std::to_string(i));
		Formula ant = i == 1 ? Formula::dia(Formula::box(p))
		                     : Formula::dia(Formula::land(Formula::box(p),
		                                                  Formula::lnot(cur)));
		cur = Formula::implies(ant, p);
	}
	return cur;
}

/// Left commutativity axiom  E<>p -> <>Ep.
inline Formula mk_com_l() {
	Formula p = Formula::var("p");
	return Formula::implies(Formula::exists(Formula::dia(p)),
	                        Formula::dia(Formula::exists(p)));
}

/// Right commutativity (monadic Barcan) axiom  <>Ep -> E<>p.
inline Formula mk_com_r() {
	Formula p = Formula::var("p");
	return Formula::implies(Formula::dia(Formula::exists(p)),
	                        Formula::exists(Formula::dia(p)));
}

/// Casari's scheme instance  []A([]([]p -> []Ap) -> []Ap) -> []Ap.
inline Formula mk_casari() {
	Formula p = Formula::var("p");
	Formula bap = Formula::box(Formula::forall(p));
	Formula inner = Formula::implies(Formula::box(Formula::implies(Formula::box(p), bap)), bap);
	return Formula::implies(Formula::box(Formula::forall(inner)), bap);
}

/// Resolve a stock formula by name: com_l, com_r, casari, bd_<k>.
inline Formula mk_named(const std::string& name) {
	if (name == "com_l") return mk_com_l();
	if (name == "com_r") return mk_com_r();
	if (name == "casari") return mk_casari();
	if (name.rfind("bd_", 0) == 0) {
		const std::string num = name.substr(3);
		if (!num.empty() && num.find_first_not_of("0123456789") == std::string::npos)
			return mk_bd(std::stoi(num));
	}
	fail(errc::unknown_name, "unknown formula name: " + name);
}

} // namespace mml
