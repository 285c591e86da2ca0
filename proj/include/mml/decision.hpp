#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mml/errors.hpp"
#include "mml/formula.hpp"
#include "mml/frame.hpp"
#include "mml/model.hpp"
#include "mml/parse.hpp"

namespace mml {

// Exhaustive finite-frame machinery: enumerate the frames of a class on a
// small carrier, search them for countermodels, and grind theorem-shaped
// biconditionals over the whole space. Everything is deterministic; searches
// report "valid up to the bound", never theoremhood.

constexpr std::uint64_t enumeration_budget = 1ull << 26;
constexpr int default_size_cap = 5;

/// All equivalence relations on {0, .., n-1}, one per set partition, in
/// restricted-growth order (block labels assigned by first appearance).
inline std::vector<Relation> equivalences(int n) {
	std::vector<Relation> out;
	std::vector<int> a(n, 0);
	while (true) {
		Relation e(n);
		for (int i = 0; i < n; ++i)
			for (int j = 0; j < n; ++j)
				if (a[i] == a[j]) e.set(i, j);
		out.push_back(e);
		int k = n - 1;
		while (k > 0) {
			int m = 0;
			for (int i = 0; i < k; ++i) m = std::max(m, a[i]);
			if (a[k] <= m) break;
			--k;
		}
		if (k == 0) break;
		++a[k];
		for (int i = k + 1; i < n; ++i) a[i] = 0;
	}
	return out;
}

/// Bit string of both adjacency matrices under a relabeling: entry (i, j)
/// reads relation(p[i], p[j]), R block first.
inline std::string adjacency_encoding(const TwoFrame& f, const std::vector<int>& p) {
	const int n = f.size();
	std::string s(std::size_t(2) * n * n, '0');
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j) {
			if (f.R.at(p[i], p[j])) s[std::size_t(i) * n + j] = '1';
			if (f.E.at(p[i], p[j])) s[std::size_t(n) * n + std::size_t(i) * n + j] = '1';
		}
	return s;
}

/// Is the frame its own lexicographically least relabeling? Exactly one
/// member of each isomorphism class is.
inline bool canonical_labelling(const TwoFrame& f) {
	std::vector<int> p(f.size());
	std::iota(p.begin(), p.end(), 0);
	std::string base = adjacency_encoding(f, p);
	while (std::next_permutation(p.begin(), p.end()))
		if (adjacency_encoding(f, p) < base) return false;
	return true;
}

/// Visit every frame of the given size in a fixed order: equivalence
/// relations in partition order, R masks ascending (bit i*n+j is R(i,j)).
/// `logic` filters by class membership; empty means all frames. The visitor
/// returns false to stop early. The budget counts raw candidates.
template <class Visitor>
inline void for_each_frame(int size, const std::optional<LogicId>& logic, bool modulo_iso,
                           Visitor&& visit, std::uint64_t budget = enumeration_budget) {
	if (size < 1) fail(errc::bad_input, "frame size must be positive");
	if (size > 7) fail(errc::bad_input, "frame enumeration supports at most 7 worlds");
	std::vector<std::string> names;
	for (int i = 0; i < size; ++i) names.push_back("w" + std::to_string(i));
	const std::uint64_t masks = 1ull << (size * size);
	std::uint64_t seen = 0;
	for (const Relation& e : equivalences(size)) {
		for (std::uint64_t mask = 0; mask < masks; ++mask) {
			if (++seen > budget)
				fail(errc::budget_exceeded, "frame enumeration budget of " +
				                                std::to_string(budget) + " candidates exhausted");
			TwoFrame f;
			f.worlds = names;
			f.E = e;
			f.R = Relation(size);
			for (int i = 0; i < size; ++i)
				for (int j = 0; j < size; ++j)
					if (mask >> (i * size + j) & 1) f.R.set(i, j);
			if (logic && !frame_class_check(f, *logic)) continue;
			if (modulo_iso && !canonical_labelling(f)) continue;
			if (!visit(f)) return;
		}
	}
}

/// The frames of a class on a carrier of the given size, materialized in
/// enumeration order; with modulo_iso, canonical representatives only.
inline std::vector<TwoFrame> enumerate_frames(int size, const LogicId& logic,
                                              bool modulo_iso = false,
                                              int size_cap = default_size_cap,
                                              std::uint64_t budget = enumeration_budget) {
	if (size < 1 || size > size_cap)
		fail(errc::bad_input,
		     "frame size out of range (cap " + std::to_string(size_cap) + ")");
	std::vector<TwoFrame> out;
	for_each_frame(size, logic, modulo_iso, [&](const TwoFrame& f) {
		out.push_back(f);
		return true;
	}, budget);
	return out;
}

// ---------------------------------------------------------------------------
// Bounded countermodel search.

enum class SearchStatus { refuted, valid_up_to_bound };

inline std::string to_string(SearchStatus s) {
	return s == SearchStatus::refuted ? "refuted" : "valid_up_to_bound";
}

struct SearchWitness {
	TwoFrame frame;
	std::map<std::string, Bits> valuation;
	int world = -1;
};

struct SearchOutcome {
	SearchStatus status = SearchStatus::valid_up_to_bound;
	std::optional<SearchWitness> witness;
	int bound = 0;
	std::uint64_t frames_examined = 0;
};

/// Scan the class's frames at sizes 1..max_size for one refuting the
/// formula. Only canonical representatives are checked (validity is
/// isomorphism-invariant); the first hit in enumeration order is returned.
inline SearchOutcome countermodel(const Formula& phi, const LogicId& logic, int max_size,
                                  std::uint64_t budget = enumeration_budget) {
	if (max_size < 1) fail(errc::bad_input, "search bound must be positive");
	SearchOutcome out;
	out.bound = max_size;
	for (int s = 1; s <= max_size; ++s) {
		bool done = false;
		for_each_frame(s, logic, true, [&](const TwoFrame& f) {
			++out.frames_examined;
			if (auto ce = find_refutation(f, phi)) {
				out.status = SearchStatus::refuted;
				out.witness = SearchWitness{f, ce->valuation, ce->world};
				done = true;
				return false;
			}
			return true;
		}, budget);
		if (done) break;
	}
	return out;
}

// ---------------------------------------------------------------------------
// Translation cross-check.

struct CrosscheckDetail {
	int size = 0;
	SearchOutcome original;   // the formula over clean-cluster reflexive frames
	SearchOutcome translated; // its splitting over strict-order frames
};

/// A formula must be refutable over M+GrzB frames exactly when its splitting
/// translation is refutable over MGLB frames, at every bound up to max_size.
/// On disagreement the offending pair of outcomes is reported through
/// `detail`.
inline bool crosscheck_translation(const Formula& phi, int max_size,
                                   CrosscheckDetail* detail = nullptr,
                                   std::uint64_t budget = enumeration_budget) {
	Formula split = boxplus_translate(phi);
	const LogicId clean{LogicBase::MPlusGrz, true, {}};
	const LogicId strict{LogicBase::MGL, true, {}};
	for (int s = 1; s <= max_size; ++s) {
		SearchOutcome a = countermodel(phi, clean, s, budget);
		SearchOutcome b = countermodel(split, strict, s, budget);
		if (a.status != b.status) {
			if (detail) *detail = {s, std::move(a), std::move(b)};
			return false;
		}
	}
	return true;
}

// ---------------------------------------------------------------------------
// Theorem suites: exhaustive finite checks of the library's backbone facts.

struct SuiteReport {
	std::string suite;
	int cap = 0;
	std::uint64_t cases = 0;
	std::vector<std::string> counterexamples;

	bool ok() const { return counterexamples.empty(); }
};

inline std::string frame_summary(const TwoFrame& f) {
	std::string r, e;
	for (int i = 0; i < f.size(); ++i)
		for (int j = 0; j < f.size(); ++j) {
			if (f.R.at(i, j)) r += " " + std::to_string(i) + ">" + std::to_string(j);
			if (i < j && f.E.at(i, j)) e += " " + std::to_string(i) + "~" + std::to_string(j);
		}
	return "n=" + std::to_string(f.size()) + " R:" + (r.empty() ? " none" : r) +
	       " E:" + (e.empty() ? " none" : e);
}

/// Fixed formula corpus for the translation-shaped suites.
inline std::vector<Formula> suite_formulas() {
	std::vector<Formula> out = {mk_com_l(), mk_com_r(), mk_casari(), mk_bd(1), mk_bd(2)};
	for (const char* text :
	     {"p", "<>p", "[]p -> p", "Ep -> p", "<>Ep1 -> E<>p1", "[](p -> []p)",
	      "A<>p | ~p1", "<>(p & Ep1) -> <>p1 & <>p"})
		out.push_back(parse(text));
	return out;
}

/// Run one registered suite, checking its statement over every frame (or
/// frame pair) within the size cap. A healthy library produces an empty
/// counterexample list.
inline SuiteReport verify_theorem_suite(const std::string& name, int cap,
                                        std::uint64_t budget = enumeration_budget) {
	if (cap < 1) fail(errc::bad_input, "size cap must be positive");
	SuiteReport rep;
	rep.suite = name;
	rep.cap = cap;

	if (name == "casari") {
		// over reflexive partial orders: the Casari formula holds exactly on
		// frames whose clusters carry no internal R step
		Formula cas = mk_casari();
		for (int s = 1; s <= cap; ++s)
			for_each_frame(s, LogicId{LogicBase::MGrz, false, {}}, false,
			               [&](const TwoFrame& f) {
				               ++rep.cases;
				               if (frame_validates(f, cas) != clean_clusters(f))
					               rep.counterexamples.push_back(frame_summary(f));
				               return true;
			               }, budget);
	} else if (name == "bd_depth") {
		// over transitive frames: bd_n holds exactly on frames of depth <= n
		for (int s = 1; s <= cap; ++s)
			for_each_frame(s, LogicId{LogicBase::MK, false, {}}, false,
			               [&](const TwoFrame& f) {
				               if (!f.R.is_transitive()) return true;
				               int d = depth(f);
				               for (int n = 1; n <= 3; ++n) {
					               ++rep.cases;
					               if (frame_validates(f, mk_bd(n)) != (d <= n))
						               rep.counterexamples.push_back(
						                   "bd_" + std::to_string(n) + " on " + frame_summary(f));
				               }
				               return true;
			               }, budget);
	} else if (name == "refl_valid") {
		// the splitting translation holds on a frame iff the original holds
		// on its reflexivization, for every frame and formula
		std::vector<std::pair<Formula, Formula>> corpus;
		for (const Formula& phi : suite_formulas())
			corpus.emplace_back(phi, boxplus_translate(phi));
		for (int s = 1; s <= cap; ++s)
			for_each_frame(s, std::nullopt, false, [&](const TwoFrame& f) {
				TwoFrame fr = reflexivize(f);
				for (const auto& [phi, split] : corpus) {
					++rep.cases;
					if (frame_validates(f, split) != frame_validates(fr, phi))
						rep.counterexamples.push_back(to_string(phi) + " on " +
						                              frame_summary(f));
				}
				return true;
			}, budget);
	} else if (name == "class_transfer") {
		// strict-order frames reflexivize into the clean-cluster class and
		// back, preserving the depth bound, with the round trip the identity
		for (int s = 1; s <= cap; ++s)
			for_each_frame(s, std::nullopt, false, [&](const TwoFrame& f) {
				for (int n = 1; n <= 3; ++n) {
					const LogicId strict{LogicBase::MGL, true, n};
					const LogicId clean{LogicBase::MPlusGrz, true, n};
					++rep.cases;
					if (frame_class_check(f, strict)) {
						TwoFrame fr = reflexivize(f);
						if (!frame_class_check(fr, clean))
							rep.counterexamples.push_back("reflexivization left " +
							                              to_string(clean) + ": " +
							                              frame_summary(f));
						else if (!labelled_equal(irreflexivize(fr), f))
							rep.counterexamples.push_back("round trip moved: " +
							                              frame_summary(f));
					}
					if (frame_class_check(f, clean)) {
						TwoFrame fi = irreflexivize(f);
						if (!frame_class_check(fi, strict))
							rep.counterexamples.push_back("irreflexivization left " +
							                              to_string(strict) + ": " +
							                              frame_summary(f));
						else if (!labelled_equal(reflexivize(fi), f))
							rep.counterexamples.push_back("round trip moved: " +
							                              frame_summary(f));
					}
				}
				return true;
			}, budget);
	} else if (name == "claim_product_refl" || name == "product_comm") {
		// product facts: reflexivization commutes with taking the product,
		// and every product validates both commutativity axioms
		Formula cl = mk_com_l(), cr = mk_com_r();
		std::uint64_t seen = 0;
		for (int n1 = 1; n1 <= cap; ++n1) {
			const std::uint64_t masks = 1ull << (n1 * n1);
			std::vector<std::string> lnames;
			for (int i = 0; i < n1; ++i) lnames.push_back("x" + std::to_string(i));
			for (std::uint64_t mask = 0; mask < masks; ++mask) {
				TwoFrame left;
				left.worlds = lnames;
				left.R = Relation(n1);
				left.E = Relation::identity(n1);
				for (int i = 0; i < n1; ++i)
					for (int j = 0; j < n1; ++j)
						if (mask >> (i * n1 + j) & 1) left.R.set(i, j);
				for (int n2 = 1; n2 <= cap; ++n2) {
					std::vector<std::string> rnames;
					for (int i = 0; i < n2; ++i) rnames.push_back("u" + std::to_string(i));
					for (const Relation& e : equivalences(n2)) {
						if (++seen > budget)
							fail(errc::budget_exceeded,
							     "frame enumeration budget of " + std::to_string(budget) +
							         " candidates exhausted");
						TwoFrame right{rnames, e, Relation::identity(n2)};
						++rep.cases;
						TwoFrame prod = product(left, right);
						if (name == "claim_product_refl") {
							if (!labelled_equal(reflexivize(prod),
							                    product(reflexivize(left), right)))
								rep.counterexamples.push_back(
								    frame_summary(left) + " x " + frame_summary(right));
						} else {
							if (!frame_validates(prod, cl) || !frame_validates(prod, cr))
								rep.counterexamples.push_back(
								    frame_summary(left) + " x " + frame_summary(right));
						}
					}
				}
			}
		}
	} else {
		fail(errc::unknown_suite, "unknown suite: " + name);
	}
	return rep;
}

} // namespace mml
