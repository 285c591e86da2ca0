#pragma once

#include <vector>

#include "mml/bits.hpp"

namespace mml {

/// Binary relation on {0, .., n-1} as a dense bit matrix, one Bits row per
/// source. Row i is the successor set of i.
class Relation {
public:
	Relation() = default;
	explicit Relation(int n) : n_(n), rows_(n, Bits(n)) {}

	static Relation identity(int n) {
		Relation r(n);
		for (int i = 0; i < n; ++i) r.set(i, i);
		return r;
	}
	static Relation full(int n) {
		Relation r(n);
		for (int i = 0; i < n; ++i) r.rows_[i] = Bits::full(n);
		return r;
	}

	int size() const { return n_; }

	bool at(int i, int j) const { return rows_[i].test(j); }
	void set(int i, int j) { rows_[i].set(j); }
	void unset(int i, int j) { rows_[i].reset(j); }

	const Bits& row(int i) const { return rows_[i]; }
	Bits& row_mut(int i) { return rows_[i]; }

	Bits column(int j) const {
		Bits c(n_);
		for (int i = 0; i < n_; ++i)
			if (rows_[i].test(j)) c.set(i);
		return c;
	}

	/// Image of a set: union of successor rows.
	Bits image(const Bits& u) const {
		Bits out(n_);
		u.for_each([&](int i) { out |= rows_[i]; });
		return out;
	}

	/// this ; o  (first step via this, second via o).
	Relation compose(const Relation& o) const {
		Relation out(n_);
		for (int i = 0; i < n_; ++i) out.rows_[i] = o.image(rows_[i]);
		return out;
	}

	Relation transpose() const {
		Relation out(n_);
		for (int i = 0; i < n_; ++i)
			rows_[i].for_each([&](int j) { out.set(j, i); });
		return out;
	}

	Relation reflexive_closure() const {
		Relation out = *this;
		for (int i = 0; i < n_; ++i) out.set(i, i);
		return out;
	}

	Relation symmetric_closure() const {
		Relation out = *this;
		for (int i = 0; i < n_; ++i)
			rows_[i].for_each([&](int j) { out.set(j, i); });
		return out;
	}

	Relation transitive_closure() const {
		Relation out = *this;
		for (int k = 0; k < n_; ++k)
			for (int i = 0; i < n_; ++i)
				if (out.rows_[i].test(k)) out.rows_[i] |= out.rows_[k];
		return out;
	}

	Relation reflexive_transitive_closure() const {
		return reflexive_closure().transitive_closure();
	}

	Relation least_equivalence() const {
		return reflexive_closure().symmetric_closure().transitive_closure();
	}

	Relation irreflexive_part() const {
		Relation out = *this;
		for (int i = 0; i < n_; ++i) out.unset(i, i);
		return out;
	}

	/// Induced submatrix on the listed indices, in the given order.
	Relation restrict(const std::vector<int>& idx) const {
		Relation out(int(idx.size()));
		for (std::size_t i = 0; i < idx.size(); ++i)
			for (std::size_t j = 0; j < idx.size(); ++j)
				if (at(idx[i], idx[j])) out.set(int(i), int(j));
		return out;
	}

	bool is_reflexive() const {
		for (int i = 0; i < n_; ++i)
			if (!at(i, i)) return false;
		return true;
	}
	bool is_irreflexive() const {
		for (int i = 0; i < n_; ++i)
			if (at(i, i)) return false;
		return true;
	}
	bool is_symmetric() const {
		for (int i = 0; i < n_; ++i)
			for (int j = rows_[i].first(); j >= 0; j = rows_[i].next(j))
				if (!at(j, i)) return false;
		return true;
	}
	bool is_transitive() const {
		for (int i = 0; i < n_; ++i)
			for (int k = rows_[i].first(); k >= 0; k = rows_[i].next(k))
				if (!rows_[k].subset_of(rows_[i])) return false;
		return true;
	}
	bool is_antisymmetric() const {
		for (int i = 0; i < n_; ++i)
			for (int j = rows_[i].first(); j >= 0; j = rows_[i].next(j))
				if (i != j && at(j, i)) return false;
		return true;
	}
	bool is_equivalence() const {
		return is_reflexive() && is_symmetric() && is_transitive();
	}

	bool subset_of(const Relation& o) const {
		for (int i = 0; i < n_; ++i)
			if (!rows_[i].subset_of(o.rows_[i])) return false;
		return true;
	}

	int pair_count() const {
		int c = 0;
		for (const auto& r : rows_) c += r.count();
		return c;
	}

	/// Grow the carrier, keeping existing pairs.
	void resize(int n) {
		n_ = n;
		for (auto& r : rows_) r.resize(n);
		rows_.resize(n, Bits(n));
	}

	bool operator==(const Relation&) const = default;

private:
	int n_ = 0;
	std::vector<Bits> rows_;
};

/// Worlds with at least one r-successor inside u.
inline Bits dia_preimage(const Relation& r, const Bits& u) {
	Bits out(r.size());
	for (int i = 0; i < r.size(); ++i)
		if (r.row(i).intersects(u)) out.set(i);
	return out;
}

/// Worlds all of whose r-successors lie inside u.
inline Bits box_preimage(const Relation& r, const Bits& u) {
	Bits out(r.size());
	for (int i = 0; i < r.size(); ++i)
		if (r.row(i).subset_of(u)) out.set(i);
	return out;
}

enum class ClosureKind { reflexive, transitive, reflexive_transitive, least_equivalence };

inline Relation close(const Relation& r, ClosureKind kind) {
	switch (kind) {
	case ClosureKind::reflexive: return r.reflexive_closure();
	case ClosureKind::transitive: return r.transitive_closure();
	case ClosureKind::reflexive_transitive: return r.reflexive_transitive_closure();
	case ClosureKind::least_equivalence: return r.least_equivalence();
	}
	return r;
}

} // namespace mml
