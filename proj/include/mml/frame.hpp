#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mml/errors.hpp"
#include "mml/relation.hpp"

namespace mml {

/// Finite 2-frame: a carrier of named worlds, an arbitrary relation R (the
/// modal accessibility) and an equivalence E (the monadic quantifier
/// accessibility). Constructors that take raw pair lists close E to the least
/// equivalence; R is taken verbatim.
struct TwoFrame {
	std::vector<std::string> worlds;
	Relation R, E;

	int size() const { return int(worlds.size()); }

	int index_of(const std::string& name) const {
		for (int i = 0; i < size(); ++i)
			if (worlds[i] == name) return i;
		return -1;
	}

	int require_world(const std::string& name) const {
		int i = index_of(name);
		if (i < 0) fail(errc::unknown_world, "unknown world: " + name);
		return i;
	}

	bool operator==(const TwoFrame&) const = default;
};

using WorldPair = std::pair<std::string, std::string>;

/// Build a frame from world names and relation pair lists. Validates names,
/// closes E to the least equivalence containing the given pairs.
inline TwoFrame make_frame(std::vector<std::string> worlds,
                           const std::vector<WorldPair>& r_pairs,
                           const std::vector<WorldPair>& e_pairs) {
	if (worlds.empty()) fail(errc::bad_input, "a frame needs at least one world");
	TwoFrame f;
	f.worlds = std::move(worlds);
	for (int i = 0; i < f.size(); ++i)
		for (int j = i + 1; j < f.size(); ++j)
			if (f.worlds[i] == f.worlds[j])
				fail(errc::bad_input, "duplicate world name: " + f.worlds[i]);
	f.R = Relation(f.size());
	f.E = Relation(f.size());
	for (const auto& [a, b] : r_pairs) f.R.set(f.require_world(a), f.require_world(b));
	for (const auto& [a, b] : e_pairs) f.E.set(f.require_world(a), f.require_world(b));
	f.E = f.E.least_equivalence();
	return f;
}

/// Same worlds-as-a-set, same relations under the name correspondence.
inline bool labelled_equal(const TwoFrame& a, const TwoFrame& b) {
	if (a.size() != b.size()) return false;
	std::vector<int> to_b(a.size());
	for (int i = 0; i < a.size(); ++i) {
		int j = b.index_of(a.worlds[i]);
		if (j < 0) return false;
		to_b[i] = j;
	}
	for (int i = 0; i < a.size(); ++i)
		for (int j = 0; j < a.size(); ++j) {
			if (a.R.at(i, j) != b.R.at(to_b[i], to_b[j])) return false;
			if (a.E.at(i, j) != b.E.at(to_b[i], to_b[j])) return false;
		}
	return true;
}

// ---------------------------------------------------------------------------
// Commutativity and cluster structure.

enum class Side { left, right };

/// left:  aEb, bRc implies some d with aRd, dEc   (E;R contained in R;E)
/// right: aRb, bEc implies some d with aEd, dRc   (R;E contained in E;R)
inline bool satisfies_commutativity(const TwoFrame& f, Side side) {
	Relation er = f.E.compose(f.R);
	Relation re = f.R.compose(f.E);
	return side == Side::left ? er.subset_of(re) : re.subset_of(er);
}

/// No E-cluster contains a proper R-arrow: uEv and uRv imply u = v.
inline bool clean_clusters(const TwoFrame& f) {
	for (int i = 0; i < f.size(); ++i) {
		Bits both = f.E.row(i) & f.R.row(i);
		both.reset(i);
		if (both.any()) return false;
	}
	return true;
}

/// Composite accessibility Q = R;E.
inline Relation q_relation(const TwoFrame& f) { return f.R.compose(f.E); }

// ---------------------------------------------------------------------------
// Depth: the longest strict chain x1 R x2 R ... R xn (adjacent steps not
// reversible). Only meaningful for transitive R, where strict chains visit
// mutual-reachability clusters monotonically, so the depth is the longest
// path in the condensation.

inline int depth(const TwoFrame& f) {
	if (!f.R.is_transitive())
		fail(errc::non_transitive, "depth requires a transitive relation");
	const int n = f.size();
	std::vector<int> cluster(n, -1);
	int nc = 0;
	for (int i = 0; i < n; ++i) {
		if (cluster[i] >= 0) continue;
		cluster[i] = nc;
		for (int j = i + 1; j < n; ++j)
			if (f.R.at(i, j) && f.R.at(j, i)) cluster[j] = nc;
		++nc;
	}
	// Longest path (in nodes) through the condensation DAG, by memoized DFS.
	Relation dag(nc);
	for (int i = 0; i < n; ++i)
		f.R.row(i).for_each([&](int j) {
			if (cluster[i] != cluster[j]) dag.set(cluster[i], cluster[j]);
		});
	std::vector<int> best(nc, 0);
	auto longest = [&](auto&& self, int c) -> int {
		if (best[c]) return best[c];
		int m = 1;
		dag.row(c).for_each([&](int d) { m = std::max(m, 1 + self(self, d)); });
		return best[c] = m;
	};
	int out = 0;
	for (int c = 0; c < nc; ++c) out = std::max(out, longest(longest, c));
	return out;
}

// ---------------------------------------------------------------------------
// Frame constructions.

/// Same carrier and E, reflexive closure of R.
inline TwoFrame reflexivize(const TwoFrame& f) {
	return {f.worlds, f.R.reflexive_closure(), f.E};
}

/// Same carrier and E, R without its diagonal. Rejected on frames with dirty
/// clusters, where the construction does not preserve commutativity.
inline TwoFrame irreflexivize(const TwoFrame& f) {
	if (!clean_clusters(f))
		fail(errc::dirty_cluster, "irreflexivization requires clean clusters");
	return {f.worlds, f.R.irreflexive_part(), f.E};
}

/// Product of a unimodal frame (left, R-direction; its E must be the
/// identity) with an S5 frame (right; its R must be an equivalence and is
/// used as the E-direction). Worlds are named "(x,u)".
inline TwoFrame product(const TwoFrame& left, const TwoFrame& right) {
	if (left.E != Relation::identity(left.size()))
		fail(errc::bad_input, "product: left factor must have identity E");
	if (!right.R.is_equivalence())
		fail(errc::bad_input, "product: right factor must be an S5 frame");
	if (right.E != Relation::identity(right.size()))
		fail(errc::bad_input, "product: right factor must have identity E");
	const int n1 = left.size(), n2 = right.size();
	TwoFrame out;
	out.worlds.reserve(std::size_t(n1) * n2);
	for (int x = 0; x < n1; ++x)
		for (int u = 0; u < n2; ++u)
			out.worlds.push_back("(" + left.worlds[x] + "," + right.worlds[u] + ")");
	out.R = Relation(n1 * n2);
	out.E = Relation(n1 * n2);
	for (int x = 0; x < n1; ++x)
		for (int u = 0; u < n2; ++u)
			for (int y = 0; y < n1; ++y)
				for (int v = 0; v < n2; ++v) {
					if (left.R.at(x, y) && u == v) out.R.set(x * n2 + u, y * n2 + v);
					if (x == y && right.R.at(u, v)) out.E.set(x * n2 + u, y * n2 + v);
				}
	return out;
}

/// E-skeleton: E-clusters as points, with [x] -> [y] when some members are
/// Q-related. Clusters are ordered by least member.
struct Skeleton {
	std::vector<std::vector<int>> classes; // member world indices, ascending
	Relation R0;                           // on class indices
};

inline Skeleton e_skeleton(const TwoFrame& f) {
	Skeleton sk;
	std::vector<int> cls(f.size(), -1);
	for (int i = 0; i < f.size(); ++i) {
		if (cls[i] >= 0) continue;
		int c = int(sk.classes.size());
		sk.classes.emplace_back();
		f.E.row(i).for_each([&](int j) {
			cls[j] = c;
			sk.classes.back().push_back(j);
		});
	}
	sk.R0 = Relation(int(sk.classes.size()));
	Relation q = q_relation(f);
	for (int i = 0; i < f.size(); ++i)
		q.row(i).for_each([&](int j) { sk.R0.set(cls[i], cls[j]); });
	return sk;
}

/// A p-morphism is onto and maps successor sets onto successor sets, for both
/// relations. `map` sends source world index to target world index.
inline bool is_pmorphism(const std::vector<int>& map, const TwoFrame& from,
                         const TwoFrame& to) {
	if (int(map.size()) != from.size()) fail(errc::bad_input, "map size mismatch");
	Bits hit(to.size());
	for (int i = 0; i < from.size(); ++i) {
		if (map[i] < 0 || map[i] >= to.size()) fail(errc::bad_input, "map out of range");
		hit.set(map[i]);
	}
	if (hit != Bits::full(to.size())) return false;
	auto image = [&](const Bits& u) {
		Bits out(to.size());
		u.for_each([&](int i) { out.set(map[i]); });
		return out;
	};
	for (int i = 0; i < from.size(); ++i) {
		if (image(from.R.row(i)) != to.R.row(map[i])) return false;
		if (image(from.E.row(i)) != to.E.row(map[i])) return false;
	}
	return true;
}

// ---------------------------------------------------------------------------
// Logic identifiers and finite frame classes.

enum class LogicBase { MK, MS4, MGrz, MGL, MPlusGrz };

/// A logic name: base, optional Barcan marker B, optional depth bound [n].
struct LogicId {
	LogicBase base = LogicBase::MK;
	bool barcan = false;
	std::optional<int> depth_bound;

	bool operator==(const LogicId&) const = default;
};

inline std::string to_string(const LogicId& id) {
	std::string s;
	switch (id.base) {
	case LogicBase::MK: s = "MK"; break;
	case LogicBase::MS4: s = "MS4"; break;
	case LogicBase::MGrz: s = "MGrz"; break;
	case LogicBase::MGL: s = "MGL"; break;
	case LogicBase::MPlusGrz: s = "M+Grz"; break;
	}
	if (id.barcan) s += 'B';
	if (id.depth_bound) s += "[" + std::to_string(*id.depth_bound) + "]";
	return s;
}

inline LogicId parse_logic_id(const std::string& text) {
	static const std::vector<std::pair<std::string, LogicBase>> bases = {
	    {"M+Grz", LogicBase::MPlusGrz}, {"MPlusGrz", LogicBase::MPlusGrz},
	    {"MGrz", LogicBase::MGrz},      {"MS4", LogicBase::MS4},
	    {"MGL", LogicBase::MGL},        {"MK", LogicBase::MK},
	};
	LogicId id;
	std::size_t pos = 0;
	bool found = false;
	for (const auto& [name, base] : bases)
		if (text.rfind(name, 0) == 0) {
			id.base = base;
			pos = name.size();
			found = true;
			break;
		}
	if (!found) fail(errc::unknown_logic, "unknown logic: " + text);
	if (pos < text.size() && text[pos] == 'B') {
		id.barcan = true;
		++pos;
	}
	if (pos < text.size() && text[pos] == '[') {
		std::size_t close = text.find(']', pos);
		std::string num = close == std::string::npos ? "" : text.substr(pos + 1, close - pos - 1);
		if (num.empty() || num.size() > 6 ||
		    num.find_first_not_of("0123456789") != std::string::npos ||
		    close + 1 != text.size())
			fail(errc::unknown_logic, "unknown logic: " + text);
		id.depth_bound = std::stoi(num);
		if (*id.depth_bound < 1) fail(errc::unknown_logic, "unknown logic: " + text);
		pos = text.size();
	}
	if (pos != text.size()) fail(errc::unknown_logic, "unknown logic: " + text);
	return id;
}

/// Membership of a frame in the finite frame class a logic name denotes.
/// Every class requires E to be an equivalence and left commutativity; B adds
/// right commutativity; a depth bound [n] additionally requires transitive R
/// with depth at most n.
inline bool frame_class_check(const TwoFrame& f, const LogicId& id) {
	if (!f.E.is_equivalence()) return false;
	if (!satisfies_commutativity(f, Side::left)) return false;
	if (id.barcan && !satisfies_commutativity(f, Side::right)) return false;
	switch (id.base) {
	case LogicBase::MK: break;
	case LogicBase::MS4:
		if (!f.R.is_reflexive() || !f.R.is_transitive()) return false;
		break;
	case LogicBase::MGrz:
		if (!f.R.is_reflexive() || !f.R.is_transitive() || !f.R.is_antisymmetric())
			return false;
		break;
	case LogicBase::MPlusGrz:
		if (!f.R.is_reflexive() || !f.R.is_transitive() || !f.R.is_antisymmetric())
			return false;
		if (!clean_clusters(f)) return false;
		break;
	case LogicBase::MGL:
		if (!f.R.is_irreflexive() || !f.R.is_transitive()) return false;
		break;
	}
	if (id.depth_bound) {
		if (!f.R.is_transitive()) return false;
		if (depth(f) > *id.depth_bound) return false;
	}
	return true;
}

} // namespace mml
