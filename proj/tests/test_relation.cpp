#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mml/relation.hpp"

using mml::Bits;
using mml::Relation;

namespace {

Relation random_relation(std::mt19937& rng, int n, unsigned density_pct) {
	Relation r(n);
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
			if (rng() % 100 < density_pct) r.set(i, j);
	return r;
}

// Reference closure: add pairs until nothing changes.
Relation fixpoint_equivalence(const Relation& r) {
	Relation e = r;
	for (int i = 0; i < e.size(); ++i) e.set(i, i);
	bool changed = true;
	while (changed) {
		changed = false;
		for (int i = 0; i < e.size(); ++i)
			for (int j = 0; j < e.size(); ++j) {
				if (e.at(i, j) && !e.at(j, i)) {
					e.set(j, i);
					changed = true;
				}
				for (int k = 0; k < e.size(); ++k)
					if (e.at(i, j) && e.at(j, k) && !e.at(i, k)) {
						e.set(i, k);
						changed = true;
					}
			}
	}
	return e;
}

} // namespace

TEST_CASE("bits basics") {
	Bits b(70);
	REQUIRE(b.none());
	b.set(0);
	b.set(69);
	REQUIRE(b.count() == 2);
	REQUIRE(b.first() == 0);
	REQUIRE(b.next(0) == 69);
	REQUIRE(b.next(69) == -1);
	REQUIRE(b.test(69));
	b.reset(69);
	REQUIRE(!b.test(69));

	Bits f = Bits::full(70);
	REQUIRE(f.count() == 70);
	REQUIRE(f.complement().none());
	REQUIRE(Bits::singleton(5, 3).to_vector() == std::vector<int>{3});

	Bits x(8), y(8);
	x.set(1);
	x.set(2);
	y.set(2);
	y.set(3);
	REQUIRE((x & y).to_vector() == std::vector<int>{2});
	REQUIRE((x | y).count() == 3);
	REQUIRE((x - y).to_vector() == std::vector<int>{1});
	REQUIRE(x.intersects(y));
	REQUIRE((x & y).subset_of(x));
}

TEST_CASE("closure examples") {
	// {(x,y)} reflexive-transitive over {x,y}
	Relation r(2);
	r.set(0, 1);
	Relation rt = close(r, mml::ClosureKind::reflexive_transitive);
	REQUIRE(rt.at(0, 0));
	REQUIRE(rt.at(1, 1));
	REQUIRE(rt.at(0, 1));
	REQUIRE(!rt.at(1, 0));

	// {(x,y),(y,z)} transitive adds (x,z)
	Relation s(3);
	s.set(0, 1);
	s.set(1, 2);
	Relation st = close(s, mml::ClosureKind::transitive);
	REQUIRE(st.at(0, 2));
	REQUIRE(st.pair_count() == 3);

	// {(x,y)} least equivalence over {x,y,z}: identity plus the symmetric pair
	Relation q(3);
	q.set(0, 1);
	Relation qe = close(q, mml::ClosureKind::least_equivalence);
	REQUIRE(qe.at(0, 1));
	REQUIRE(qe.at(1, 0));
	REQUIRE(qe.at(2, 2));
	REQUIRE(!qe.at(0, 2));
	REQUIRE(qe.pair_count() == 5);
	REQUIRE(qe.is_equivalence());
}

TEST_CASE("closure properties") {
	std::mt19937 rng(7);
	for (int trial = 0; trial < 200; ++trial) {
		int n = 1 + int(rng() % 5);
		Relation r = random_relation(rng, n, 30);
		for (auto kind : {mml::ClosureKind::reflexive, mml::ClosureKind::transitive,
		                  mml::ClosureKind::reflexive_transitive,
		                  mml::ClosureKind::least_equivalence}) {
			Relation c = close(r, kind);
			REQUIRE(r.subset_of(c));
			REQUIRE(close(c, kind) == c);
		}
		REQUIRE(close(r, mml::ClosureKind::least_equivalence) == fixpoint_equivalence(r));
	}
}

TEST_CASE("compose, transpose, image") {
	std::mt19937 rng(11);
	for (int trial = 0; trial < 100; ++trial) {
		int n = 1 + int(rng() % 5);
		Relation a = random_relation(rng, n, 40);
		Relation b = random_relation(rng, n, 40);

		Relation ab = a.compose(b);
		for (int i = 0; i < n; ++i)
			for (int j = 0; j < n; ++j) {
				bool want = false;
				for (int k = 0; k < n; ++k) want = want || (a.at(i, k) && b.at(k, j));
				REQUIRE(ab.at(i, j) == want);
			}

		Relation at = a.transpose();
		for (int i = 0; i < n; ++i)
			for (int j = 0; j < n; ++j) REQUIRE(at.at(i, j) == a.at(j, i));
		REQUIRE(at.transpose() == a);

		Bits u(n);
		for (int i = 0; i < n; ++i)
			if (rng() % 2) u.set(i);
		Bits img = a.image(u);
		Bits want(n);
		for (int i = 0; i < n; ++i)
			for (int j = 0; j < n; ++j)
				if (u.test(i) && a.at(i, j)) want.set(j);
		REQUIRE(img == want);

		Bits pre = dia_preimage(a, u);
		Bits preb = box_preimage(a, u);
		for (int i = 0; i < n; ++i) {
			bool some = false, all = true;
			for (int j = 0; j < n; ++j)
				if (a.at(i, j)) {
					some = some || u.test(j);
					all = all && u.test(j);
				}
			REQUIRE(pre.test(i) == some);
			REQUIRE(preb.test(i) == all);
		}
	}
}

TEST_CASE("predicates against naive definitions") {
	std::mt19937 rng(13);
	for (int trial = 0; trial < 200; ++trial) {
		int n = 1 + int(rng() % 4);
		Relation r = random_relation(rng, n, 55);
		bool refl = true, irr = true, sym = true, tra = true, anti = true;
		for (int i = 0; i < n; ++i) {
			refl = refl && r.at(i, i);
			irr = irr && !r.at(i, i);
			for (int j = 0; j < n; ++j) {
				sym = sym && (!r.at(i, j) || r.at(j, i));
				anti = anti && (!(r.at(i, j) && r.at(j, i)) || i == j);
				for (int k = 0; k < n; ++k)
					tra = tra && (!(r.at(i, j) && r.at(j, k)) || r.at(i, k));
			}
		}
		REQUIRE(r.is_reflexive() == refl);
		REQUIRE(r.is_irreflexive() == irr);
		REQUIRE(r.is_symmetric() == sym);
		REQUIRE(r.is_transitive() == tra);
		REQUIRE(r.is_antisymmetric() == anti);
		REQUIRE(r.is_equivalence() == (refl && sym && tra));
	}
}

TEST_CASE("restrict and resize") {
	Relation r(4);
	r.set(0, 3);
	r.set(3, 1);
	r.set(1, 1);
	Relation sub = r.restrict({0, 3, 1});
	REQUIRE(sub.size() == 3);
	REQUIRE(sub.at(0, 1)); // 0 -> 3
	REQUIRE(sub.at(1, 2)); // 3 -> 1
	REQUIRE(sub.at(2, 2)); // 1 -> 1
	REQUIRE(sub.pair_count() == 3);

	Relation g(2);
	g.set(0, 1);
	g.resize(4);
	REQUIRE(g.size() == 4);
	REQUIRE(g.at(0, 1));
	REQUIRE(g.pair_count() == 1);
}
