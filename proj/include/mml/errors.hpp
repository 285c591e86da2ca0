#pragma once

#include <stdexcept>
#include <string>

namespace mml {

enum class errc {
	syntax,
	unknown_world,
	unknown_logic,
	unknown_suite,
	unknown_name,
	bad_input,
	non_transitive,
	dirty_cluster,
	not_refuted,
	smax_not_found,
	witness_not_found,
	budget_exceeded,
	source_class,
};

inline const char* errc_name(errc c) {
	switch (c) {
	case errc::syntax: return "SyntaxError";
	case errc::unknown_world: return "UnknownWorld";
	case errc::unknown_logic: return "UnknownLogic";
	case errc::unknown_suite: return "UnknownSuite";
	case errc::unknown_name: return "UnknownName";
	case errc::bad_input: return "BadInput";
	case errc::non_transitive: return "NonTransitive";
	case errc::dirty_cluster: return "DirtyCluster";
	case errc::not_refuted: return "NotRefuted";
	case errc::smax_not_found: return "SmaxNotFound";
	case errc::witness_not_found: return "WitnessNotFound";
	case errc::budget_exceeded: return "BudgetExceeded";
	case errc::source_class: return "SourceClassMismatch";
	}
	return "Error";
}

/// Domain error. `offset` is a byte position for syntax errors, npos otherwise.
class error : public std::runtime_error {
public:
	static constexpr std::size_t npos = static_cast<std::size_t>(-1);

	error(errc code, std::string msg, std::size_t offset = npos)
	    : std::runtime_error(std::move(msg)), code_(code), offset_(offset) {}

	errc code() const noexcept { return code_; }
	std::size_t offset() const noexcept { return offset_; }

private:
	errc code_;
	std::size_t offset_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg,
                              std::size_t offset = error::npos) {
	throw error(code, msg, offset);
}

} // namespace mml
