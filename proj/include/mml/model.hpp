#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mml/formula.hpp"
#include "mml/frame.hpp"

namespace mml {

/// A model: frame plus valuation. Variables absent from the map denote the
/// empty set; every Bits value is sized to the carrier.
struct Model {
	TwoFrame frame;
	std::map<std::string, Bits> valuation;

	Bits var_set(const std::string& name) const {
		auto it = valuation.find(name);
		return it != valuation.end() ? it->second : Bits(frame.size());
	}
};

/// Truth-set evaluator over one model, memoized per AST node. References
/// returned stay valid for the evaluator's lifetime.
class Evaluator {
public:
	explicit Evaluator(const Model& m) : m_(&m) {}

	const Bits& truth_set(const Formula& f) {
		auto it = cache_.find(f.raw());
		if (it != cache_.end()) return it->second;
		Bits r = compute(f);
		return cache_.emplace(f.raw(), std::move(r)).first->second;
	}

	bool satisfies(int world, const Formula& f) { return truth_set(f).test(world); }

private:
	Bits compute(const Formula& f) {
		const int n = m_->frame.size();
		switch (f.kind()) {
		case Kind::var: return m_->var_set(f.var_name());
		case Kind::tru: return Bits::full(n);
		case Kind::fls: return Bits(n);
		case Kind::lnot: return truth_set(f.lhs()).complement();
		case Kind::land: return truth_set(f.lhs()) & truth_set(f.rhs());
		case Kind::lor: return truth_set(f.lhs()) | truth_set(f.rhs());
		case Kind::implies: return truth_set(f.lhs()).complement() | truth_set(f.rhs());
		case Kind::dia: return dia_preimage(m_->frame.R, truth_set(f.lhs()));
		case Kind::box: return box_preimage(m_->frame.R, truth_set(f.lhs()));
		case Kind::exists: return dia_preimage(m_->frame.E, truth_set(f.lhs()));
		case Kind::forall: return box_preimage(m_->frame.E, truth_set(f.lhs()));
		}
		return Bits(n);
	}

	const Model* m_;
	std::unordered_map<const void*, Bits> cache_;
};

inline Bits truth_set(const Model& m, const Formula& f) {
	return Evaluator(m).truth_set(f);
}

inline bool satisfies(const Model& m, int world, const Formula& f) {
	if (world < 0 || world >= m.frame.size())
		fail(errc::unknown_world, "world index out of range");
	return Evaluator(m).satisfies(world, f);
}

inline bool satisfies(const Model& m, const std::string& world, const Formula& f) {
	return satisfies(m, m.frame.require_world(world), f);
}

// ---------------------------------------------------------------------------
// Frame validity by exhaustive valuation search.

constexpr std::uint64_t default_budget = std::uint64_t(1) << 22;

struct Counterexample {
	std::map<std::string, Bits> valuation; // over the formula's variables only
	int world = 0;
};

namespace detail {

/// Flat evaluation program: subformula items in dependency order with child
/// slots resolved to indices, so a valuation sweep does no hashing.
struct EvalProgram {
	struct Item {
		Kind kind;
		int a = -1, b = -1; // child slots
		int var = -1;       // slot into the sorted variable list
	};
	std::vector<Item> items;
	std::vector<std::string> var_names;
	int root = 0;

	explicit EvalProgram(const Formula& f) {
		SubformulaSet s(f);
		var_names = vars(f);
		std::map<std::string, int> slot;
		for (int i = 0; i < int(var_names.size()); ++i) slot[var_names[i]] = i;
		items.reserve(std::size_t(s.size()));
		for (const Formula& g : s) {
			Item it;
			it.kind = g.kind();
			if (g.lhs().valid()) it.a = s.index_of(g.lhs());
			if (g.rhs().valid()) it.b = s.index_of(g.rhs());
			if (g.kind() == Kind::var) it.var = slot[g.var_name()];
			items.push_back(it);
		}
		root = s.size() - 1;
	}

	/// Evaluate all items on `f` for the valuation packed in `mask` with bit
	/// layout var_slot * |worlds| + world. `truth` is caller-owned scratch.
	void eval(const TwoFrame& f, std::uint64_t mask, std::vector<Bits>& truth) const {
		const int n = f.size();
		truth.resize(items.size());
		for (std::size_t i = 0; i < items.size(); ++i) {
			const Item& it = items[i];
			switch (it.kind) {
			case Kind::var: {
				Bits v(n);
				for (int w = 0; w < n; ++w)
					if ((mask >> (it.var * n + w)) & 1u) v.set(w);
				truth[i] = std::move(v);
				break;
			}
			case Kind::tru: truth[i] = Bits::full(n); break;
			case Kind::fls: truth[i] = Bits(n); break;
			case Kind::lnot: truth[i] = truth[it.a].complement(); break;
			case Kind::land: truth[i] = truth[it.a] & truth[it.b]; break;
			case Kind::lor: truth[i] = truth[it.a] | truth[it.b]; break;
			case Kind::implies:
				truth[i] = truth[it.a].complement() | truth[it.b];
				break;
			case Kind::dia: truth[i] = dia_preimage(f.R, truth[it.a]); break;
			case Kind::box: truth[i] = box_preimage(f.R, truth[it.a]); break;
			case Kind::exists: truth[i] = dia_preimage(f.E, truth[it.a]); break;
			case Kind::forall: truth[i] = box_preimage(f.E, truth[it.a]); break;
			}
		}
	}
};

} // namespace detail

/// First refuting (valuation, world) in enumeration order, or nullopt when
/// every valuation makes f true everywhere. Valuations are enumerated as
/// ascending bit masks over sorted variables; the world is the least-index
/// world refuted under the first refuting valuation.
inline std::optional<Counterexample> find_refutation(const TwoFrame& f, const Formula& phi,
                                                     std::uint64_t budget = default_budget) {
	detail::EvalProgram prog(phi);
	const int n = f.size();
	const int bits = int(prog.var_names.size()) * n;
	if (bits >= 63 || (std::uint64_t(1) << bits) > budget)
		fail(errc::budget_exceeded,
		     "validity search needs 2^" + std::to_string(bits) +
		         " valuations, over the budget of " + std::to_string(budget));
	const std::uint64_t total = std::uint64_t(1) << bits;
	std::vector<Bits> truth;
	const Bits everywhere = Bits::full(n);
	for (std::uint64_t mask = 0; mask < total; ++mask) {
		prog.eval(f, mask, truth);
		if (truth[prog.root] == everywhere) continue;
		Counterexample ce;
		for (int s = 0; s < int(prog.var_names.size()); ++s) {
			Bits v(n);
			for (int w = 0; w < n; ++w)
				if ((mask >> (s * n + w)) & 1u) v.set(w);
			ce.valuation[prog.var_names[s]] = std::move(v);
		}
		ce.world = truth[prog.root].complement().first();
		return ce;
	}
	return std::nullopt;
}

inline bool frame_validates(const TwoFrame& f, const Formula& phi,
                            std::uint64_t budget = default_budget) {
	return !find_refutation(f, phi, budget).has_value();
}

// ---------------------------------------------------------------------------
// Maximality machinery.

/// Points x of U with no R-move to a different point of U.
inline Bits max_points(const TwoFrame& f, const Bits& u) {
	Bits out(f.size());
	u.for_each([&](int x) {
		Bits ahead = f.R.row(x) & u;
		ahead.reset(x);
		if (ahead.none()) out.set(x);
	});
	return out;
}

/// Maximal points whose Q-moves into U stay inside their own E-cluster.
inline Bits smax_points(const TwoFrame& f, const Bits& u) {
	Relation q = q_relation(f);
	Bits out(f.size());
	max_points(f, u).for_each([&](int x) {
		Bits escape = (q.row(x) & u) - f.E.row(x);
		if (escape.none()) out.set(x);
	});
	return out;
}

// ---------------------------------------------------------------------------
// Witness demand sets for the filtration engine.

/// Modal demands a world t places on the frame being grown around it.
/// w_exists / w_dia: true modal formulas whose body t itself refutes, needing
/// a separate witness point. w_forall / w_box: false ones needing a separate
/// refuting successor. A false forall-formula whose body fails at t needs no
/// entry (the grown E is always reflexive); for dia and box the analogous
/// shortcut is taken only when `self_witness` is set, since the grown R is
/// not reflexive in every variant.
struct WitnessSets {
	std::vector<Formula> w_exists, w_dia;
	std::vector<Formula> w_forall, w_box;
};

inline WitnessSets witness_sets(const Model& m, int t, const SubformulaSet& s,
                                bool self_witness = true) {
	if (t < 0 || t >= m.frame.size())
		fail(errc::unknown_world, "world index out of range");
	Evaluator ev(m);
	WitnessSets out;
	for (const Formula& g : s) {
		switch (g.kind()) {
		case Kind::exists:
			if (ev.satisfies(t, g) && !ev.satisfies(t, g.lhs())) out.w_exists.push_back(g);
			break;
		case Kind::dia:
			if (ev.satisfies(t, g) && (!self_witness || !ev.satisfies(t, g.lhs())))
				out.w_dia.push_back(g);
			break;
		case Kind::forall:
			if (!ev.satisfies(t, g) && ev.satisfies(t, g.lhs())) out.w_forall.push_back(g);
			break;
		case Kind::box:
			if (!ev.satisfies(t, g) && (!self_witness || ev.satisfies(t, g.lhs())))
				out.w_box.push_back(g);
			break;
		default: break;
		}
	}
	return out;
}

/// Worlds x and y agree on every formula of S.
inline bool sim_s(const Model& m, int x, int y, const SubformulaSet& s) {
	Evaluator ev(m);
	for (const Formula& g : s)
		if (ev.satisfies(x, g) != ev.satisfies(y, g)) return false;
	return true;
}

} // namespace mml
