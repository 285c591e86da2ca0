#pragma once

#include <cctype>
#include <string>

#include "mml/errors.hpp"
#include "mml/formula.hpp"

namespace mml {

namespace detail {

// Recursive-descent parser for the concrete syntax
//   formula := impl
//   impl    := or ("->" impl)?
//   or      := and ("|" and)*
//   and     := unary ("&" unary)*
//   unary   := ("~" | "<>" | "[]" | "E" | "A")* primary
//   primary := atom | "true" | "false" | "(" formula ")"
//   atom    := "p" digit*
// Whitespace is insignificant everywhere.
class Parser {
public:
	explicit Parser(const std::string& text) : s_(text) {}

	Formula run() {
		Formula f = impl();
		skip_ws();
		if (pos_ != s_.size())
			fail(errc::syntax, "unexpected input at byte " + std::to_string(pos_), pos_);
		return f;
	}

private:
	Formula impl() {
		Formula left = disj();
		skip_ws();
		if (match("->")) return Formula::implies(std::move(left), impl());
		return left;
	}

	Formula disj() {
		Formula f = conj();
		while (true) {
			skip_ws();
			// Careful not to eat the first dash of "->".
			if (peek() == '|') {
				++pos_;
				f = Formula::lor(std::move(f), conj());
			} else {
				return f;
			}
		}
	}

	Formula conj() {
		Formula f = unary();
		while (true) {
			skip_ws();
			if (peek() == '&') {
				++pos_;
				f = Formula::land(std::move(f), unary());
			} else {
				return f;
			}
		}
	}

	Formula unary() {
		skip_ws();
		if (match("~")) return Formula::lnot(unary());
		if (match("<>")) return Formula::dia(unary());
		if (match("[]")) return Formula::box(unary());
		if (peek() == 'E') {
			++pos_;
			return Formula::exists(unary());
		}
		if (peek() == 'A') {
			++pos_;
			return Formula::forall(unary());
		}
		return primary();
	}

	Formula primary() {
		skip_ws();
		std::size_t here = pos_;
		if (match("(")) {
			Formula f = impl();
			skip_ws();
			if (!match(")"))
				fail(errc::syntax, "expected ')' at byte " + std::to_string(pos_), pos_);
			return f;
		}
		if (peek() == 'p') {
			std::string name = "p";
			++pos_;
			while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
				name += s_[pos_++];
			return Formula::var(std::move(name));
		}
		if (match("true")) return Formula::tru();
		if (match("false")) return Formula::fls();
		fail(errc::syntax, "expected a formula at byte " + std::to_string(here), here);
	}

	char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

	bool match(const char* tok) {
		std::size_t k = 0;
		while (tok[k] && pos_ + k < s_.size() && s_[pos_ + k] == tok[k]) ++k;
		if (tok[k]) return false;
		pos_ += k;
		return true;
	}

	void skip_ws() {
		while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
	}

	const std::string& s_;
	std::size_t pos_ = 0;
};

} // namespace detail

/// Parse the concrete syntax; throws a SyntaxError with a byte offset.
inline Formula parse(const std::string& text) { return detail::Parser(text).run(); }

} // namespace mml
