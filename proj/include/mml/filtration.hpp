#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mml/errors.hpp"
#include "mml/formula.hpp"
#include "mml/frame.hpp"
#include "mml/model.hpp"

namespace mml {

// Selective filtration: starting from one world of a finite model that
// refutes a formula, grow a small frame whose points are copies of source
// worlds, adding only the successors and cluster-mates that the subformulas
// of the target formula demand, plus repair points that restore the two
// commutativity laws. Each grown point records the definable subset of the
// source carrier in which its world was selected as strongly maximal; the
// verification pass re-derives every guarantee from that record.

enum class FiltrationVariant { MGrz, MGrzB, MPlusGrzB, MGLB };

inline std::string to_string(FiltrationVariant v) {
	switch (v) {
	case FiltrationVariant::MGrz: return "MGrz";
	case FiltrationVariant::MGrzB: return "MGrzB";
	case FiltrationVariant::MPlusGrzB: return "M+GrzB";
	case FiltrationVariant::MGLB: return "MGLB";
	}
	return "?";
}

inline FiltrationVariant parse_variant(const std::string& text) {
	if (text == "MGrz") return FiltrationVariant::MGrz;
	if (text == "MGrzB") return FiltrationVariant::MGrzB;
	if (text == "M+GrzB" || text == "MPlusGrzB") return FiltrationVariant::MPlusGrzB;
	if (text == "MGLB") return FiltrationVariant::MGLB;
	fail(errc::unknown_logic, "unknown filtration variant: " + text);
}

/// The grown relation stays reflexive in every variant except MGLB, whose
/// frames are strict orders.
inline bool variant_reflexive(FiltrationVariant v) {
	return v != FiltrationVariant::MGLB;
}

/// All variants except plain MGrz maintain right commutativity as well.
inline bool variant_barcan(FiltrationVariant v) {
	return v != FiltrationVariant::MGrz;
}

/// The two clean-cluster variants never place a diamond witness inside the
/// cluster of the demanding point.
inline bool variant_horizontal(FiltrationVariant v) {
	return v == FiltrationVariant::MGrz || v == FiltrationVariant::MGrzB;
}

inline LogicId variant_source_logic(FiltrationVariant v) {
	switch (v) {
	case FiltrationVariant::MGrz: return {LogicBase::MGrz, false, {}};
	case FiltrationVariant::MGrzB: return {LogicBase::MGrz, true, {}};
	case FiltrationVariant::MPlusGrzB: return {LogicBase::MPlusGrz, true, {}};
	case FiltrationVariant::MGLB: return {LogicBase::MGL, true, {}};
	}
	return {};
}

/// Frame class the grown frame is checked against: a partially ordered
/// MS4-style frame (with right commutativity for the Barcan variants), or a
/// strict order for MGLB. Clean clusters are not promised by the
/// construction, so M+GrzB runs are checked against the MGrzB class.
inline LogicId variant_target_logic(FiltrationVariant v) {
	switch (v) {
	case FiltrationVariant::MGrz: return {LogicBase::MGrz, false, {}};
	case FiltrationVariant::MGrzB: return {LogicBase::MGrz, true, {}};
	case FiltrationVariant::MPlusGrzB: return {LogicBase::MGrz, true, {}};
	case FiltrationVariant::MGLB: return {LogicBase::MGL, true, {}};
	}
	return {};
}

inline std::uint64_t pow2_saturating(std::uint64_t k) {
	return k >= 63 ? ~0ull : 1ull << k;
}

/// Upper bound on the depth of the grown frame, from the size of the
/// subformula set. The clean-cluster variants admit the smaller bound.
inline std::uint64_t filtration_depth_bound(int subformulas, FiltrationVariant v) {
	bool slim = v == FiltrationVariant::MPlusGrzB || v == FiltrationVariant::MGLB;
	return pow2_saturating(std::uint64_t(subformulas) + (slim ? 1 : subformulas + 1));
}

/// One grown point: a copy of `source`, introduced by `rule`, selected as a
/// strongly maximal element of `provenance` (a subset of the source carrier).
struct HattedPoint {
	int source = -1;
	std::string rule;
	Bits provenance;

	bool operator==(const HattedPoint&) const = default;
};

struct StepLogEntry {
	std::string rule;   // which sub-step fired
	std::string detail; // the demand formula or commutativity instance
	int at = -1;        // demanding point (grown index)
	int witness = -1;   // witness point (grown index)
	bool introduced = false;

	bool operator==(const StepLogEntry&) const = default;
};

struct SelectionState {
	std::vector<HattedPoint> points; // in introduction order
	Relation r_hat{0}, e_hat{0};
	std::uint64_t round = 0; // outer sweeps completed or underway
	std::uint64_t inner = 0; // commutativity passes within the current sweep

	int size() const { return int(points.size()); }

	int index_of_source(int src) const {
		for (int i = 0; i < size(); ++i)
			if (points[i].source == src) return i;
		return -1;
	}
};

struct FiltrationChecks {
	bool truth_lemma = false;
	bool target_class = false;
	bool skeleton_depth = false;
	bool cluster_chains = false;
	bool total_depth = false;
	bool e_matches_source = false; // grown E agrees with source E on sources
	bool r_within_q = false;       // grown R edges project into source Q
	bool r_edge_shape = false;     // each R edge is cluster-internal or cluster-jumping
	bool injective_sources = false;

	bool all() const {
		return truth_lemma && target_class && skeleton_depth && cluster_chains &&
		       total_depth && e_matches_source && r_within_q && r_edge_shape &&
		       injective_sources;
	}
};

struct FiltrationReport {
	Model result; // grown frame, worlds named after their sources
	std::vector<HattedPoint> points;
	std::vector<StepLogEntry> log;
	FiltrationVariant variant = FiltrationVariant::MGrz;
	int subformula_count = 0;
	int result_depth = 0;
	std::uint64_t depth_bound = 0;
	FiltrationChecks checks;
};

class FiltrationEngine {
public:
	/// `budget` caps point and base-pair additions; 0 means 10 * |carrier|^2.
	FiltrationEngine(Model m, Formula phi, FiltrationVariant variant,
	                 std::uint64_t budget = 0)
	    : m_(std::move(m)),
	      phi_(std::move(phi)),
	      variant_(variant),
	      s_(phi_),
	      q_(q_relation(m_.frame)) {
		int n = m_.frame.size();
		budget_ = budget ? budget : 10ull * std::uint64_t(n) * std::uint64_t(n);
		reflexive_ = variant_reflexive(variant_);
		Evaluator ev(m_);
		for (const Formula& g : s_) {
			ModalEntry e;
			e.g = g;
			switch (g.kind()) {
			case Kind::dia:
				e.body = ev.truth_set(g.lhs());
				e.op = ev.truth_set(g);
				dia_family_.push_back(fill_plus(std::move(e)));
				break;
			case Kind::box:
				e.body = ev.truth_set(g.lhs()).complement();
				e.op = ev.truth_set(g).complement();
				dia_family_.push_back(fill_plus(std::move(e)));
				break;
			case Kind::exists:
				e.body = ev.truth_set(g.lhs());
				e.op = ev.truth_set(g);
				exists_family_.push_back(fill_plus(std::move(e)));
				break;
			case Kind::forall:
				e.body = ev.truth_set(g.lhs()).complement();
				e.op = ev.truth_set(g).complement();
				exists_family_.push_back(fill_plus(std::move(e)));
				break;
			default: break;
			}
		}
	}

	const SelectionState& state() const { return st_; }
	const std::vector<StepLogEntry>& log() const { return log_; }
	const SubformulaSet& subformulas() const { return s_; }

	/// Copy a strongly maximal refuting world as the seed point.
	void select_initial() {
		if (!st_.points.empty()) fail(errc::bad_input, "initial point already selected");
		Bits refuting = truth_set(m_, phi_).complement();
		if (refuting.none())
			fail(errc::not_refuted, "formula is not refuted in the model: " + to_string(phi_));
		Bits sm = smax_points(m_.frame, refuting);
		if (sm.none())
			fail(errc::smax_not_found,
			     "no strongly maximal refuting world for " + to_string(phi_));
		int x = sm.first();
		add_point(x, "initial", refuting);
		log_.push_back({"initial", to_string(phi_), -1, 0, true});
	}

	/// Give every point a cluster-mate for each cluster demand it carries: a
	/// true exists-formula whose body fails at the point, or a false
	/// forall-formula whose body holds there. Points added along the way are
	/// processed in the same call.
	bool exists_step() {
		require_seeded();
		bool changed = false;
		for (int i = 0; i < st_.size(); ++i) {
			int t = st_.points[i].source;
			for (const ModalEntry& e : exists_family_) {
				if (!e.op.test(t) || e.body.test(t)) continue;
				if (witnessed(st_.e_hat.row(i), e.body)) continue;
				Bits pool = m_.frame.E.image(st_.points[i].provenance) & e.body;
				Bits sm = smax_points(m_.frame, pool);
				if (sm.none())
					fail(errc::smax_not_found, "no strongly maximal witness for " +
					                               to_string(e.g) + " at " + world(t));
				Bits cand = sm & m_.frame.E.row(t);
				if (cand.none())
					fail(errc::witness_not_found, "no cluster witness for " +
					                                  to_string(e.g) + " at " + world(t));
				auto [j, intro] = place(cand.first(), "exists", pool);
				add_e(i, j);
				log_.push_back({"exists", to_string(e.g), i, j, intro});
				changed = true;
			}
		}
		return changed;
	}

	/// Give every point a successor for each successor demand it carries: a
	/// true diamond-formula or a false box-formula. The witness is taken
	/// inside the point's own cluster when the variant allows it, otherwise
	/// from a cluster strictly above; either way it must avoid everything the
	/// demanding world's false diamond-formulas forbid.
	bool dia_step() {
		require_seeded();
		bool changed = false;
		for (int i = 0; i < st_.size(); ++i) {
			int y = st_.points[i].source;
			for (const ModalEntry& e : dia_family_) {
				if (!e.op.test(y)) continue;
				if (reflexive_ && e.body.test(y)) continue;
				if (witnessed(st_.r_hat.row(i), e.body)) continue;
				Bits a = e.plus;
				for (const ModalEntry& f : dia_family_)
					if (!f.op.test(y)) a -= f.plus;
				Bits sm = smax_points(m_.frame, a);
				Bits base = sm & max_points(m_.frame, reflexive_ ? e.body : e.plus);
				bool resolved = false;
				if (variant_horizontal(variant_)) {
					Bits hcand = base & m_.frame.R.row(y) & m_.frame.E.row(y);
					if (hcand.any()) {
						auto [j, intro] = place_prefer_selected(hcand, "dia-horizontal", a);
						add_r(i, j);
						add_e(i, j);
						log_.push_back({intro ? "dia-horizontal-new" : "dia-horizontal-reuse",
						                to_string(e.g), i, j, intro});
						resolved = true;
					}
				}
				if (!resolved) {
					// MGLB witnesses sit one real step up; the others may sit
					// anywhere above the cluster.
					const Bits& above = variant_ == FiltrationVariant::MGLB
					                        ? m_.frame.R.row(y)
					                        : q_.row(y);
					Bits vcand = (base & above) - m_.frame.E.row(y);
					if (vcand.any()) {
						auto [j, intro] = place_prefer_selected(vcand, "dia-vertical", a);
						add_r(i, j);
						log_.push_back({intro ? "dia-vertical-new" : "dia-vertical-reuse",
						                to_string(e.g), i, j, intro});
						if (intro) merge_into_clusters(j);
						resolved = true;
					}
				}
				if (!resolved) {
					if (a.any() && sm.none())
						fail(errc::smax_not_found, "no strongly maximal witness for " +
						                               to_string(e.g) + " at " + world(y));
					fail(errc::witness_not_found, "no successor witness for " +
					                                  to_string(e.g) + " at " + world(y));
				}
				changed = true;
			}
		}
		return changed;
	}

	/// Close one direction of commutativity: whenever a cluster-mate of t has
	/// a successor w that t cannot match through its own successors, insert a
	/// successor of t into w's cluster. Runs to a fixpoint.
	bool lc_step() {
		require_seeded();
		bool changed = false;
		for (;;) {
			auto [a, c] = first_gap(st_.e_hat, st_.r_hat);
			if (a < 0) break;
			int t = st_.points[a].source, w = st_.points[c].source;
			Bits pool = m_.frame.E.image(st_.points[c].provenance);
			Bits sm = smax_points(m_.frame, pool);
			if (sm.none())
				fail(errc::smax_not_found,
				     "no strongly maximal left-commutativity witness over " + world(w));
			Bits cand = sm & m_.frame.R.row(t) & m_.frame.E.row(w);
			if (cand.none())
				fail(errc::witness_not_found, "no left-commutativity witness for " +
				                                  world(t) + " over " + world(w));
			auto [j, intro] = place(cand.first(), "lc", pool);
			add_r(a, j);
			add_e(j, c);
			log_.push_back({"lc", world(t) + " / " + world(w), a, j, intro});
			changed = true;
		}
		return changed;
	}

	/// The converse direction: whenever t has a successor w whose cluster
	/// contains u, insert a cluster-mate of t from which u is reachable. The
	/// mate must keep every diamond-formula that u's vicinity realizes.
	bool rc_step() {
		require_seeded();
		bool changed = false;
		for (;;) {
			auto [a, c] = first_gap(st_.r_hat, st_.e_hat);
			if (a < 0) break;
			int t = st_.points[a].source, u = st_.points[c].source;
			Bits v = Bits::full(m_.frame.size());
			for (const ModalEntry& f : dia_family_)
				if (f.plus.test(u)) v &= f.op;
			Bits pool = m_.frame.E.image(st_.points[a].provenance) & v;
			Bits sm = smax_points(m_.frame, pool);
			if (pool.any() && sm.none())
				fail(errc::smax_not_found,
				     "no strongly maximal right-commutativity witness beside " + world(t));
			Bits cand = sm & q_.column(u) & m_.frame.E.row(t);
			if (variant_ == FiltrationVariant::MGLB) cand -= m_.frame.E.row(u);
			if (cand.none())
				fail(errc::witness_not_found, "no right-commutativity witness for " +
				                                  world(t) + " under " + world(u));
			auto [j, intro] = place(cand.first(), "rc", pool);
			add_r(j, c);
			add_e(a, j);
			log_.push_back({"rc", world(t) + " / " + world(u), a, j, intro});
			changed = true;
		}
		return changed;
	}

	/// Full construction: seed, then sweep cluster demands, successor demands
	/// and the commutativity repairs until nothing changes.
	void run() {
		if (st_.points.empty()) select_initial();
		for (;;) {
			++st_.round;
			bool changed = exists_step();
			changed |= dia_step();
			st_.inner = 0;
			if (!variant_barcan(variant_)) {
				++st_.inner;
				changed |= lc_step();
			} else {
				bool lc_quiet = false, rc_quiet = false;
				while (!(lc_quiet && rc_quiet)) {
					bool moved = st_.inner % 2 == 0 ? lc_step() : rc_step();
					if (st_.inner % 2 == 0) {
						lc_quiet = !moved;
						if (moved) rc_quiet = false;
					} else {
						rc_quiet = !moved;
						if (moved) lc_quiet = false;
					}
					++st_.inner;
					changed |= moved;
				}
			}
			if (!changed) break;
		}
	}

	/// The grown model: worlds carry their source names, the valuation is the
	/// source valuation pulled back along the copying.
	Model result() const {
		TwoFrame f;
		f.worlds.reserve(st_.points.size());
		for (const HattedPoint& p : st_.points) f.worlds.push_back(world(p.source));
		f.R = st_.r_hat;
		f.E = st_.e_hat;
		Model out{std::move(f), {}};
		for (const auto& [name, set] : m_.valuation) {
			Bits v(st_.size());
			for (int j = 0; j < st_.size(); ++j)
				if (set.test(st_.points[j].source)) v.set(j);
			out.valuation[name] = v;
		}
		return out;
	}

	FiltrationReport report() const {
		FiltrationReport rep;
		rep.result = result();
		rep.points = st_.points;
		rep.log = log_;
		rep.variant = variant_;
		rep.subformula_count = s_.size();
		rep.result_depth = depth(rep.result.frame);
		rep.depth_bound = filtration_depth_bound(s_.size(), variant_);
		return rep;
	}

private:
	struct ModalEntry {
		Formula g;
		Bits body; // worlds the demanded witness must come from
		Bits op;   // worlds where the demand is live (the modal formula's value)
		Bits plus; // body or a body one step ahead
	};

	static ModalEntry fill_plus(ModalEntry e) {
		e.plus = e.body | e.op;
		return e;
	}

	std::string world(int t) const { return m_.frame.worlds[t]; }

	void require_seeded() const {
		if (st_.points.empty()) fail(errc::bad_input, "no initial point selected");
	}

	void spend() {
		if (++actions_ > budget_)
			fail(errc::budget_exceeded,
			     "filtration budget of " + std::to_string(budget_) + " actions exhausted");
	}

	int add_point(int src, const char* rule, Bits provenance) {
		spend();
		st_.points.push_back({src, rule, std::move(provenance)});
		int n = st_.size();
		st_.r_hat.resize(n);
		st_.e_hat.resize(n);
		st_.e_hat.set(n - 1, n - 1);
		if (reflexive_) st_.r_hat.set(n - 1, n - 1);
		return n - 1;
	}

	/// Place the witness with the given source: connect to its existing copy
	/// if one was grown before, otherwise introduce one.
	std::pair<int, bool> place(int src, const char* rule, const Bits& provenance) {
		int j = st_.index_of_source(src);
		if (j >= 0) return {j, false};
		return {add_point(src, rule, provenance), true};
	}

	/// Reuse any existing copy found among the candidates (least source
	/// first); only introduce a point when no candidate has been grown yet.
	std::pair<int, bool> place_prefer_selected(const Bits& cand, const char* rule,
	                                           const Bits& provenance) {
		int best = -1;
		for (int i = 0; i < st_.size(); ++i) {
			int s = st_.points[i].source;
			if (cand.test(s) && (best < 0 || s < st_.points[best].source)) best = i;
		}
		if (best >= 0) return {best, false};
		return {add_point(cand.first(), rule, provenance), true};
	}

	void add_r(int a, int b) {
		spend();
		st_.r_hat.set(a, b);
		st_.r_hat = reflexive_ ? st_.r_hat.reflexive_transitive_closure()
		                       : st_.r_hat.transitive_closure();
	}

	void add_e(int a, int b) {
		spend();
		st_.e_hat.set(a, b);
		st_.e_hat = st_.e_hat.least_equivalence();
	}

	/// A freshly introduced point joins the clusters of all earlier points
	/// its source is cluster-related to.
	void merge_into_clusters(int j) {
		int z = st_.points[j].source;
		for (int k = 0; k < st_.size(); ++k) {
			if (k == j || st_.e_hat.at(j, k)) continue;
			if (!m_.frame.E.at(z, st_.points[k].source)) continue;
			add_e(j, k);
			log_.push_back({"dia-cluster-merge", world(z) + " / " + world(st_.points[k].source),
			                j, k, false});
		}
	}

	/// Does any point reachable through `row` have its source in `src_set`?
	bool witnessed(const Bits& row, const Bits& src_set) const {
		bool hit = false;
		row.for_each([&](int j) { hit = hit || src_set.test(st_.points[j].source); });
		return hit;
	}

	/// First pair (a, c) reachable by `first` then `second` but not by
	/// `second` then `first`, in lexicographic order; (-1, -1) if none.
	std::pair<int, int> first_gap(const Relation& first, const Relation& second) const {
		Relation have = second.compose(first);
		for (int a = 0; a < st_.size(); ++a) {
			Bits want = second.image(first.row(a)) - have.row(a);
			if (want.any()) return {a, want.first()};
		}
		return {-1, -1};
	}

	Model m_;
	Formula phi_;
	FiltrationVariant variant_;
	SubformulaSet s_;
	Relation q_;
	std::vector<ModalEntry> dia_family_, exists_family_;
	SelectionState st_;
	std::vector<StepLogEntry> log_;
	std::uint64_t budget_ = 0, actions_ = 0;
	bool reflexive_ = true;
};

/// Re-derive every guarantee of a finished run from the report alone: the
/// copied points agree with their sources on all subformulas, the grown frame
/// lands in the target class, the three depth bounds hold, and the grown
/// relations project back correctly onto the source relations.
inline FiltrationChecks filtration_checks(const Model& source, const FiltrationReport& rep,
                                          const SubformulaSet& s, FiltrationVariant variant) {
	FiltrationChecks c;
	const Model& res = rep.result;
	int n = res.frame.size();
	if (n == 0 || int(rep.points.size()) != n) return c;

	Evaluator src_ev(source), res_ev(res);
	c.truth_lemma = true;
	for (int i = 0; i < n && c.truth_lemma; ++i)
		for (const Formula& g : s)
			if (res_ev.satisfies(i, g) != src_ev.satisfies(rep.points[i].source, g)) {
				c.truth_lemma = false;
				break;
			}

	c.target_class = frame_class_check(res.frame, variant_target_logic(variant));

	auto depth_at_most = [](const TwoFrame& f, std::uint64_t bound) {
		try {
			return std::uint64_t(depth(f)) <= bound;
		} catch (const error&) {
			return false; // not even transitive
		}
	};
	std::uint64_t cluster_bound = pow2_saturating(std::uint64_t(s.size()));
	std::uint64_t skeleton_bound = pow2_saturating(std::uint64_t(s.size()) + 1);
	Skeleton sk = e_skeleton(res.frame);
	{
		TwoFrame skf;
		for (const auto& members : sk.classes)
			skf.worlds.push_back(res.frame.worlds[members.front()]);
		skf.R = sk.R0;
		skf.E = Relation::identity(int(sk.classes.size()));
		c.skeleton_depth = depth_at_most(skf, skeleton_bound);
	}
	c.cluster_chains = true;
	for (const auto& members : sk.classes) {
		TwoFrame sub;
		for (int i : members) sub.worlds.push_back(res.frame.worlds[i]);
		sub.R = res.frame.R.restrict(members);
		sub.E = Relation::identity(int(members.size()));
		if (!depth_at_most(sub, cluster_bound)) {
			c.cluster_chains = false;
			break;
		}
	}
	c.total_depth = depth_at_most(res.frame, filtration_depth_bound(s.size(), variant));

	Relation q = q_relation(source.frame);
	c.e_matches_source = true;
	c.r_within_q = true;
	c.r_edge_shape = true;
	for (int i = 0; i < n; ++i) {
		int si = rep.points[i].source;
		for (int j = 0; j < n; ++j) {
			int sj = rep.points[j].source;
			if (res.frame.E.at(i, j) != source.frame.E.at(si, sj)) c.e_matches_source = false;
			if (res.frame.R.at(i, j)) {
				if (!q.at(si, sj)) c.r_within_q = false;
				bool internal = source.frame.R.at(si, sj) && source.frame.E.at(si, sj);
				bool jumping = q.at(si, sj) && !source.frame.E.at(si, sj);
				if (!internal && !jumping) c.r_edge_shape = false;
			}
		}
	}
	c.injective_sources = true;
	for (int i = 0; i < n && c.injective_sources; ++i)
		for (int j = i + 1; j < n; ++j)
			if (rep.points[i].source == rep.points[j].source) {
				c.injective_sources = false;
				break;
			}
	return c;
}

inline bool verify_report(const Model& source, const FiltrationReport& rep,
                          const SubformulaSet& s, FiltrationVariant variant) {
	return filtration_checks(source, rep, s, variant).all();
}

/// Run the whole pipeline: check the source frame is in the variant's class,
/// grow the frame, and attach the verification results to the report.
inline FiltrationReport run_filtration(const Model& m, const Formula& phi,
                                       FiltrationVariant variant,
                                       std::uint64_t budget = 0) {
	LogicId src = variant_source_logic(variant);
	if (!frame_class_check(m.frame, src))
		fail(errc::source_class, "source frame is not a " + to_string(src) + " frame");
	FiltrationEngine engine(m, phi, variant, budget);
	engine.run();
	FiltrationReport rep = engine.report();
	rep.checks = filtration_checks(m, rep, engine.subformulas(), variant);
	return rep;
}

} // namespace mml
