#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "mml/model.hpp"
#include "mml/parse.hpp"
#include "random_formula.hpp"

using mml::Bits;
using mml::Formula;
using mml::Model;
using mml::Relation;
using mml::TwoFrame;

namespace {

TwoFrame d2() {
	return mml::make_frame({"x", "y"}, {{"x", "x"}, {"x", "y"}, {"y", "y"}}, {{"x", "y"}});
}

TwoFrame sm4() {
	return mml::make_frame(
	    {"a", "b", "c", "d"},
	    {{"a", "a"}, {"b", "b"}, {"c", "c"}, {"d", "d"}, {"a", "d"}, {"b", "c"}},
	    {{"a", "b"}, {"c", "d"}});
}

Model d2_py() {
	Model m{d2(), {}};
	m.valuation["p"] = Bits::singleton(2, 1);
	return m;
}

mml::errc code_of(const std::function<void()>& fn) {
	try {
		fn();
	} catch (const mml::error& e) {
		return e.code();
	}
	return mml::errc{-1};
}

TwoFrame random_2frame(std::mt19937& rng, int n) {
	TwoFrame f;
	for (int i = 0; i < n; ++i) f.worlds.push_back("w" + std::to_string(i));
	f.R = Relation(n);
	Relation e(n);
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j) {
			if (rng() % 100 < 40) f.R.set(i, j);
			if (rng() % 100 < 30) e.set(i, j);
		}
	f.E = e.least_equivalence();
	return f;
}

} // namespace

TEST_CASE("satisfaction on the dirty 2-frame") {
	Model m = d2_py();
	REQUIRE(mml::satisfies(m, "x", mml::parse("<>p")));
	REQUIRE(mml::satisfies(m, "x", mml::parse("Ep")));
	REQUIRE(!mml::satisfies(m, "x", mml::parse("p")));
	REQUIRE(mml::satisfies(m, "y", mml::parse("p")));
	REQUIRE(mml::satisfies(m, "y", mml::parse("[]p"))); // y only sees itself
	REQUIRE(!mml::satisfies(m, "x", mml::parse("Ap")));
	REQUIRE(mml::truth_set(m, mml::parse("<>p")) == Bits::full(2));
	REQUIRE(mml::truth_set(m, mml::parse("false")).none());
	REQUIRE(mml::truth_set(m, mml::parse("p5")).none()); // unvalued variable
	REQUIRE(code_of([&] { mml::satisfies(m, "zz", mml::parse("p")); }) ==
	        mml::errc::unknown_world);
}

TEST_CASE("box and forall are the duals of dia and exists") {
	std::mt19937 rng(17);
	for (int trial = 0; trial < 120; ++trial) {
		int n = 1 + int(rng() % 4);
		Model m{random_2frame(rng, n), {}};
		for (const char* v : {"p", "p1"}) {
			Bits b(n);
			for (int i = 0; i < n; ++i)
				if (rng() % 2) b.set(i);
			m.valuation[v] = b;
		}
		Formula f = random_formula(rng, 4, 2);
		REQUIRE(mml::truth_set(m, Formula::box(f)) ==
		        mml::truth_set(m, Formula::lnot(Formula::dia(Formula::lnot(f)))));
		REQUIRE(mml::truth_set(m, Formula::forall(f)) ==
		        mml::truth_set(m, Formula::lnot(Formula::exists(Formula::lnot(f)))));
		REQUIRE(mml::truth_set(m, Formula::implies(f, f)) == Bits::full(n));
	}
}

TEST_CASE("frame validity search") {
	TwoFrame f = d2();
	REQUIRE(mml::frame_validates(f, mml::mk_bd(2)));
	REQUIRE(!mml::frame_validates(f, mml::mk_bd(1)));
	REQUIRE(mml::frame_validates(f, mml::parse("true")));
	REQUIRE(!mml::frame_validates(f, mml::mk_casari()));

	// counterexamples are deterministic and re-check
	auto ce = mml::find_refutation(f, mml::mk_casari());
	REQUIRE(ce.has_value());
	REQUIRE(ce->valuation.at("p") == Bits::singleton(2, 1)); // v(p) = {y}
	REQUIRE(ce->world == 0);                                 // refuted at x
	Model m{f, ce->valuation};
	REQUIRE(!mml::satisfies(m, ce->world, mml::mk_casari()));

	auto bd1 = mml::find_refutation(f, mml::mk_bd(1));
	REQUIRE(bd1->valuation.at("p1") == Bits::singleton(2, 1));
	REQUIRE(bd1->world == 0);

	// bd_2 over two worlds needs 2^4 valuations
	REQUIRE(code_of([&] { mml::frame_validates(f, mml::mk_bd(2), 8); }) ==
	        mml::errc::budget_exceeded);
	REQUIRE(mml::frame_validates(f, mml::mk_bd(2), 16));
}

TEST_CASE("max and smax") {
	TwoFrame f = sm4();
	Bits u(4);
	u.set(0);
	u.set(1);
	u.set(2); // U = {a,b,c}
	Bits mx = mml::max_points(f, u);
	REQUIRE(mx.test(0));
	REQUIRE(!mx.test(1)); // b R c with c in U
	REQUIRE(mx.test(2));
	Bits sx = mml::smax_points(f, u);
	REQUIRE(!sx.test(0)); // a Q c escapes a's cluster
	REQUIRE(sx.to_vector() == std::vector<int>{2});

	REQUIRE(mml::max_points(f, Bits(4)).none());
	REQUIRE(mml::smax_points(f, Bits(4)).none());

	std::mt19937 rng(23);
	for (int trial = 0; trial < 200; ++trial) {
		int n = 1 + int(rng() % 5);
		TwoFrame g = random_2frame(rng, n);
		Bits u2(n);
		for (int i = 0; i < n; ++i)
			if (rng() % 2) u2.set(i);
		Bits mx2 = mml::max_points(g, u2);
		Bits sx2 = mml::smax_points(g, u2);
		REQUIRE(sx2.subset_of(mx2));
		REQUIRE(mx2.subset_of(u2));
		// E-saturated sets: strong maximality adds nothing
		Bits sat = g.E.image(u2);
		REQUIRE(mml::smax_points(g, sat) == mml::max_points(g, sat));
	}
}

TEST_CASE("reach into strong maxima - exhaustive at 3 worlds") {
	// Q[x] into smax U is guaranteed only where maximal points are (canonical
	// frames, via Fine-Esakia). On arbitrary finite reflexive-transitive
	// frames a proper R-cluster makes max U empty, so the reach property
	// fails; with R antisymmetric it holds at this scale. The engine treats
	// the property as checkable, never as an axiom.
	const int n = 3;
	std::vector<std::vector<int>> partitions = {
	    {0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {0, 1, 2}};
	int violations_all = 0, violations_antisym = 0, frames = 0;
	for (unsigned rmask = 0; rmask < 512; ++rmask) {
		Relation r(n);
		for (int i = 0; i < n; ++i)
			for (int j = 0; j < n; ++j)
				if ((rmask >> (i * n + j)) & 1u) r.set(i, j);
		if (!r.is_reflexive() || !r.is_transitive()) continue;
		for (const auto& part : partitions) {
			TwoFrame f;
			f.worlds = {"w0", "w1", "w2"};
			f.R = r;
			f.E = Relation(n);
			for (int i = 0; i < n; ++i)
				for (int j = 0; j < n; ++j)
					if (part[i] == part[j]) f.E.set(i, j);
			if (!mml::satisfies_commutativity(f, mml::Side::left)) continue;
			if (!mml::satisfies_commutativity(f, mml::Side::right)) continue;
			++frames;
			Relation q = mml::q_relation(f);
			for (unsigned umask = 1; umask < 8; ++umask) {
				Bits u(n);
				for (int i = 0; i < n; ++i)
					if ((umask >> i) & 1u) u.set(i);
				Bits sx = mml::smax_points(f, u);
				u.for_each([&](int x) {
					if (!(q.row(x) & sx).any()) {
						++violations_all;
						if (r.is_antisymmetric()) ++violations_antisym;
					}
				});
			}
		}
	}
	REQUIRE(frames == 97);
	REQUIRE(violations_all == 138);
	REQUIRE(violations_antisym == 0);
}

TEST_CASE("witness demand sets") {
	Model m = d2_py();
	mml::SubformulaSet s(mml::parse("<>Ep"));
	mml::WitnessSets w = mml::witness_sets(m, 0, s);
	REQUIRE(w.w_dia.empty()); // x satisfies Ep itself
	REQUIRE(w.w_exists.size() == 1);
	REQUIRE(w.w_exists[0] == mml::parse("Ep")); // x holds Ep but not p

	// three-point model refuting <>Ep -> E<>p at x
	Model c3{mml::make_frame({"x", "y", "z"},
	                         {{"x", "x"}, {"y", "y"}, {"z", "z"}, {"x", "y"}},
	                         {{"y", "z"}}),
	         {}};
	c3.valuation["p"] = Bits::singleton(3, 2);
	REQUIRE(!mml::satisfies(c3, "x", mml::mk_com_r()));
	mml::SubformulaSet sc(mml::mk_com_r());
	mml::WitnessSets wx = mml::witness_sets(c3, 0, sc);
	REQUIRE(wx.w_exists.empty());
	REQUIRE(wx.w_dia == std::vector<Formula>{mml::parse("<>Ep")});

	// box demands appear only for refuted boxes whose body holds locally
	Model mb = d2_py();
	mml::SubformulaSet sb(mml::parse("[]p & Ap"));
	mml::WitnessSets wy = mml::witness_sets(mb, 1, sb);
	REQUIRE(wy.w_box.empty()); // y validates []p
	mml::WitnessSets wxx = mml::witness_sets(mb, 0, sb);
	REQUIRE(wxx.w_box.empty()); // x refutes []p but also refutes p
	REQUIRE(wxx.w_forall.empty());

	Model mc{d2(), {}};
	mc.valuation["p"] = Bits::singleton(2, 0);
	mml::WitnessSets wz = mml::witness_sets(mc, 0, mml::SubformulaSet(mml::parse("[]p")));
	REQUIRE(wz.w_box == std::vector<Formula>{mml::parse("[]p")});
	// without the reflexive shortcut, the refuted-body case demands too
	mml::WitnessSets wi =
	    mml::witness_sets(mb, 0, mml::SubformulaSet(mml::parse("[]p")), false);
	REQUIRE(wi.w_box.size() == 1);
	// same for dia: a satisfied body no longer counts as its own witness
	mml::WitnessSets wd =
	    mml::witness_sets(mb, 1, mml::SubformulaSet(mml::parse("<>p")), false);
	REQUIRE(wd.w_dia == std::vector<Formula>{mml::parse("<>p")});
	REQUIRE(mml::witness_sets(mb, 1, mml::SubformulaSet(mml::parse("<>p"))).w_dia.empty());
}

TEST_CASE("agreement on a subformula set") {
	Model m = d2_py();
	mml::SubformulaSet s(mml::parse("<>p"));
	REQUIRE(mml::sim_s(m, 0, 0, s));
	REQUIRE(!mml::sim_s(m, 0, 1, s)); // they disagree on p

	Model m2{d2(), {}};
	m2.valuation["p"] = Bits::full(2);
	m2.valuation["p9"] = Bits::singleton(2, 1);
	REQUIRE(mml::sim_s(m2, 0, 1, s)); // differ only outside S
}
