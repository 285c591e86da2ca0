#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace mml {

/// Subset of a small universe {0, .., n-1}, packed into 64-bit words.
class Bits {
public:
	Bits() = default;
	explicit Bits(int n) : n_(n), w_(words(n), 0) {}

	static Bits full(int n) {
		Bits b(n);
		for (auto& w : b.w_) w = ~0ull;
		b.trim();
		return b;
	}
	static Bits singleton(int n, int i) {
		Bits b(n);
		b.set(i);
		return b;
	}

	int universe() const { return n_; }

	bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
	void set(int i) { w_[i >> 6] |= 1ull << (i & 63); }
	void reset(int i) { w_[i >> 6] &= ~(1ull << (i & 63)); }

	bool any() const {
		for (auto w : w_)
			if (w) return true;
		return false;
	}
	bool none() const { return !any(); }

	int count() const {
		int c = 0;
		for (auto w : w_) c += std::popcount(w);
		return c;
	}

	/// Least member, -1 if empty.
	int first() const {
		for (std::size_t k = 0; k < w_.size(); ++k)
			if (w_[k]) return int(k * 64 + std::countr_zero(w_[k]));
		return -1;
	}

	/// Least member greater than i, -1 if none.
	int next(int i) const {
		++i;
		if (i >= n_) return -1;
		std::size_t k = std::size_t(i) >> 6;
		std::uint64_t w = w_[k] & (~0ull << (i & 63));
		while (true) {
			if (w) return int(k * 64 + std::countr_zero(w));
			if (++k == w_.size()) return -1;
			w = w_[k];
		}
	}

	template <class F> void for_each(F f) const {
		for (int i = first(); i >= 0; i = next(i)) f(i);
	}

	std::vector<int> to_vector() const {
		std::vector<int> v;
		for_each([&](int i) { v.push_back(i); });
		return v;
	}

	Bits& operator|=(const Bits& o) {
		for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
		return *this;
	}
	Bits& operator&=(const Bits& o) {
		for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
		return *this;
	}
	/// Set difference.
	Bits& operator-=(const Bits& o) {
		for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= ~o.w_[k];
		return *this;
	}

	friend Bits operator|(Bits a, const Bits& b) { return a |= b; }
	friend Bits operator&(Bits a, const Bits& b) { return a &= b; }
	friend Bits operator-(Bits a, const Bits& b) { return a -= b; }

	Bits complement() const {
		Bits b(n_);
		for (std::size_t k = 0; k < w_.size(); ++k) b.w_[k] = ~w_[k];
		b.trim();
		return b;
	}

	bool subset_of(const Bits& o) const {
		for (std::size_t k = 0; k < w_.size(); ++k)
			if (w_[k] & ~o.w_[k]) return false;
		return true;
	}
	bool intersects(const Bits& o) const {
		for (std::size_t k = 0; k < w_.size(); ++k)
			if (w_[k] & o.w_[k]) return true;
		return false;
	}

	/// Grow the universe, keeping members.
	void resize(int n) {
		n_ = n;
		w_.resize(words(n), 0);
		trim();
	}

	bool operator==(const Bits&) const = default;

private:
	static std::size_t words(int n) { return std::size_t(n + 63) / 64; }

	void trim() {
		if (n_ & 63) w_.back() &= ~0ull >> (64 - (n_ & 63));
	}

	int n_ = 0;
	std::vector<std::uint64_t> w_;
};

} // namespace mml
